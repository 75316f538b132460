use super::{FractionalPoint, MarginalContext, SetFunction};
use crate::error::{Error, Result};

/// Maximum coverage: `f(S) = |⋃_{e∈S} sets[e]|`.
#[derive(Clone, Debug)]
pub struct CoverageObjective {
    universe_size: usize,
    sets: Vec<Vec<u32>>,
    // element lists per universe item, for the closed-form multilinear extension
    owners: Vec<Vec<u32>>,
}

impl CoverageObjective {
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut owners = vec![Vec::new(); universe_size];
        let mut packed = Vec::with_capacity(sets.len());
        for (e, set) in sets.into_iter().enumerate() {
            let mut s: Vec<u32> = Vec::with_capacity(set.len());
            for u in set {
                if u >= universe_size {
                    return Err(Error::param(format!(
                        "set {e} lists item {u} outside universe of size {universe_size}"
                    )));
                }
                s.push(u as u32);
            }
            s.sort_unstable();
            s.dedup();
            for &u in &s {
                owners[u as usize].push(e as u32);
            }
            packed.push(s);
        }
        Ok(Self {
            universe_size,
            sets: packed,
            owners,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn set(&self, e: usize) -> &[u32] {
        &self.sets[e]
    }

    /// Exact `F(x) = Σ_u (1 − Π_{e ∋ u} (1 − x_e))`.
    pub fn multilinear(&self, x: &FractionalPoint) -> f64 {
        self.owners
            .iter()
            .map(|owners| 1.0 - owners.iter().map(|&e| 1.0 - x.get(e as usize)).product::<f64>())
            .sum()
    }
}

impl SetFunction for CoverageObjective {
    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        let mut covered = vec![0u64; self.universe_size.div_ceil(64)];
        let mut count = 0u64;
        for &e in set {
            for &u in &self.sets[e] {
                let (w, b) = (u as usize / 64, 1u64 << (u % 64));
                if covered[w] & b == 0 {
                    covered[w] |= b;
                    count += 1;
                }
            }
        }
        count as f64
    }

    fn context(&self) -> Box<dyn MarginalContext + '_> {
        Box::new(CoverageContext {
            obj: self,
            covered: vec![0u64; self.universe_size.div_ceil(64)],
            count: 0,
        })
    }
}

struct CoverageContext<'a> {
    obj: &'a CoverageObjective,
    covered: Vec<u64>,
    count: u64,
}

impl CoverageContext<'_> {
    fn is_covered(&self, u: u32) -> bool {
        self.covered[u as usize / 64] & (1u64 << (u % 64)) != 0
    }
}

impl MarginalContext for CoverageContext<'_> {
    fn value(&self) -> f64 {
        self.count as f64
    }

    fn extended(&self, e: usize) -> f64 {
        let fresh = self.obj.sets[e].iter().filter(|&&u| !self.is_covered(u)).count();
        (self.count + fresh as u64) as f64
    }

    fn insert(&mut self, e: usize) {
        for &u in &self.obj.sets[e] {
            let (w, b) = (u as usize / 64, 1u64 << (u % 64));
            if self.covered[w] & b == 0 {
                self.covered[w] |= b;
                self.count += 1;
            }
        }
    }
}

/// Facility location: `f(S) = Σ_clients max_{e∈S} gains[e][client]`.
#[derive(Clone, Debug)]
pub struct FacilityLocationObjective {
    n: usize,
    clients: usize,
    gains: Vec<f64>,
}

impl FacilityLocationObjective {
    /// `gains` is row-major, `n` rows of `clients` entries.
    pub fn new(n: usize, clients: usize, gains: Vec<f64>) -> Result<Self> {
        if gains.len() != n * clients {
            return Err(Error::param(format!(
                "expected {} gains, got {}",
                n * clients,
                gains.len()
            )));
        }
        if let Some(g) = gains.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::param(format!("gain {g} is not a finite nonnegative value")));
        }
        Ok(Self { n, clients, gains })
    }

    pub fn clients(&self) -> usize {
        self.clients
    }

    pub fn row(&self, e: usize) -> &[f64] {
        &self.gains[e * self.clients..(e + 1) * self.clients]
    }
}

impl SetFunction for FacilityLocationObjective {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        (0..self.clients)
            .map(|c| {
                set.iter()
                    .map(|&e| self.gains[e * self.clients + c])
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    fn context(&self) -> Box<dyn MarginalContext + '_> {
        Box::new(FacilityContext {
            obj: self,
            best: vec![0.0; self.clients],
            value: 0.0,
        })
    }
}

struct FacilityContext<'a> {
    obj: &'a FacilityLocationObjective,
    best: Vec<f64>,
    value: f64,
}

impl MarginalContext for FacilityContext<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn extended(&self, e: usize) -> f64 {
        self.best.iter().zip(self.obj.row(e)).map(|(b, g)| b.max(*g)).sum()
    }

    fn insert(&mut self, e: usize) {
        for (b, g) in self.best.iter_mut().zip(self.obj.row(e)) {
            *b = b.max(*g);
        }
        self.value = self.best.iter().sum();
    }
}

/// Additive objective `f(S) = Σ_{e∈S} w_e`.
#[derive(Clone, Debug)]
pub struct ModularObjective {
    weights: Vec<f64>,
}

impl ModularObjective {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::param(format!("weight {w} is not a finite nonnegative value")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `F(x) = Σ_e w_e x_e`.
    pub fn multilinear(&self, x: &FractionalPoint) -> f64 {
        self.weights.iter().zip(x.coords()).map(|(w, c)| w * c).sum()
    }
}

impl SetFunction for ModularObjective {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, set: &[usize]) -> f64 {
        set.iter().map(|&e| self.weights[e]).sum()
    }

    fn context(&self) -> Box<dyn MarginalContext + '_> {
        Box::new(ModularContext {
            weights: &self.weights,
            value: 0.0,
        })
    }
}

struct ModularContext<'a> {
    weights: &'a [f64],
    value: f64,
}

impl MarginalContext for ModularContext<'_> {
    fn value(&self) -> f64 {
        self.value
    }

    fn extended(&self, e: usize) -> f64 {
        self.value + self.weights[e]
    }

    fn insert(&mut self, e: usize) {
        self.value += self.weights[e];
    }
}
