use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PyramidError, Result};

const FORMAT: &str = "mall-instance";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountBounds {
    pub min: u32,
    pub ideal: u32,
    pub max: u32,
}

/// A mall split into areas of consecutive locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MallInstance {
    /// `area_starts[a]..area_starts[a + 1]` are the locations of area `a`.
    area_starts: Vec<usize>,
    types: usize,
    groups: Vec<Vec<u16>>,
    /// Indexed `[type][area]`.
    attract: Vec<Vec<f64>>,
    base_rent: Vec<Vec<f64>>,
    revenue: Vec<f64>,
    count_bounds: Vec<CountBounds>,
    /// Maximum number of small, medium and large shops.
    size_caps: [u32; 3],
    /// Rent multipliers of small, medium and large shops.
    size_factors: [f64; 3],
    synergy_bonus: f64,
    penalty_weight_init: f64,
    #[serde(skip)]
    derived: Derived,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct Derived {
    area_of: Vec<usize>,
    alleles: Vec<u32>,
    same_group: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MallTables {
    pub area_sizes: Vec<usize>,
    pub types: usize,
    pub groups: Vec<Vec<u16>>,
    pub attract: Vec<Vec<f64>>,
    pub base_rent: Vec<Vec<f64>>,
    pub revenue: Vec<f64>,
    pub count_bounds: Vec<CountBounds>,
    pub size_caps: [u32; 3],
    pub size_factors: [f64; 3],
    pub synergy_bonus: f64,
    pub penalty_weight_init: f64,
}

impl MallInstance {
    pub fn new(t: MallTables) -> Result<Self> {
        let mut area_starts = vec![0];
        for &s in &t.area_sizes {
            area_starts.push(area_starts.last().expect("non-empty") + s);
        }
        let mut inst = Self {
            area_starts,
            types: t.types,
            groups: t.groups,
            attract: t.attract,
            base_rent: t.base_rent,
            revenue: t.revenue,
            count_bounds: t.count_bounds,
            size_caps: t.size_caps,
            size_factors: t.size_factors,
            synergy_bonus: t.synergy_bonus,
            penalty_weight_init: t.penalty_weight_init,
            derived: Derived::default(),
        };
        inst.validate()?;
        inst.derive();
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(PyramidError::InvalidInstance(msg.into()));
        let t = self.types;
        let a = self.areas();
        if t == 0 {
            return bad("a mall needs at least one shop type");
        }
        if a == 0 || self.locations() == 0 || self.area_starts.windows(2).any(|w| w[0] == w[1]) {
            return bad("every area needs at least one location");
        }
        if self.groups.len() != t
            || self.revenue.len() != t
            || self.count_bounds.len() != t
            || self.attract.len() != t
            || self.base_rent.len() != t
        {
            return bad("per-type tables disagree on the type count");
        }
        if self.attract.iter().chain(&self.base_rent).any(|row| row.len() != a) {
            return bad("per-area tables disagree on the area count");
        }
        let non_negative = |v: f64| v.is_finite() && v >= 0.0;
        if !self.attract.iter().chain(&self.base_rent).flatten().all(|&v| non_negative(v))
            || !self.revenue.iter().all(|&v| non_negative(v))
            || !non_negative(self.synergy_bonus)
            || !self.size_factors.iter().all(|&v| non_negative(v))
        {
            return bad("rent parameters must be finite and non-negative");
        }
        if self.count_bounds.iter().any(|b| !(b.min <= b.ideal && b.ideal <= b.max)) {
            return bad("count bounds must satisfy min <= ideal <= max");
        }
        Ok(())
    }

    fn derive(&mut self) {
        let mut area_of = Vec::with_capacity(self.locations());
        for a in 0..self.areas() {
            area_of.extend(std::iter::repeat_n(a, self.area_len(a)));
        }
        let t = self.types;
        let mut same_group = vec![false; t * t];
        for x in 0..t {
            for y in 0..t {
                same_group[x * t + y] = self.groups[x].iter().any(|g| self.groups[y].contains(g));
            }
        }
        self.derived = Derived { area_of, alleles: (0..t as u32).collect(), same_group };
    }

    pub fn locations(&self) -> usize {
        *self.area_starts.last().expect("non-empty")
    }

    pub fn areas(&self) -> usize {
        self.area_starts.len() - 1
    }

    pub fn area_range(&self, area: usize) -> std::ops::Range<usize> {
        self.area_starts[area]..self.area_starts[area + 1]
    }

    pub fn area_len(&self, area: usize) -> usize {
        self.area_starts[area + 1] - self.area_starts[area]
    }

    pub fn area_of(&self, location: usize) -> usize {
        self.derived.area_of[location]
    }

    pub fn types(&self) -> usize {
        self.types
    }

    pub fn type_ids(&self) -> &[u32] {
        &self.derived.alleles
    }

    pub fn groups_of(&self, t: usize) -> &[u16] {
        &self.groups[t]
    }

    /// Whether two types share a group.
    pub fn same_group(&self, a: usize, b: usize) -> bool {
        self.derived.same_group[a * self.types + b]
    }

    pub fn attract(&self, t: usize, area: usize) -> f64 {
        self.attract[t][area]
    }

    pub fn base_rent(&self, t: usize, area: usize) -> f64 {
        self.base_rent[t][area]
    }

    pub fn revenue(&self, t: usize) -> f64 {
        self.revenue[t]
    }

    pub fn bounds(&self, t: usize) -> CountBounds {
        self.count_bounds[t]
    }

    pub fn size_caps(&self) -> [u32; 3] {
        self.size_caps
    }

    pub fn size_factors(&self) -> [f64; 3] {
        self.size_factors
    }

    pub fn synergy_bonus(&self) -> f64 {
        self.synergy_bonus
    }

    pub fn penalty_weight_init(&self) -> f64 {
        self.penalty_weight_init
    }

    pub fn to_json(&self) -> String {
        let file = MallFile { format: FORMAT.into(), version: VERSION, mall: self.clone() };
        serde_json::to_string_pretty(&file).expect("instance serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MallFile = serde_json::from_str(text).map_err(|e| PyramidError::Format(e.to_string()))?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(PyramidError::Format(format!(
                "expected {FORMAT} v{VERSION}, found {} v{}",
                file.format, file.version
            )));
        }
        let mut inst = file.mall;
        if inst.area_starts.first() != Some(&0) || inst.area_starts.windows(2).any(|w| w[0] > w[1]) {
            return Err(PyramidError::Format("area boundaries must start at 0 and ascend".into()));
        }
        inst.validate()?;
        inst.derive();
        Ok(inst)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct MallFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    mall: MallInstance,
}
