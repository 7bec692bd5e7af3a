use serde::{Deserialize, Serialize};

/// Range and transform of one tunable hyperparameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub lower: f64,
    pub upper: f64,
    pub log: bool,
    pub integer: bool,
}

impl ParamSpec {
    const fn new(name: &'static str, lower: f64, upper: f64, log: bool, integer: bool) -> Self {
        Self { name, lower, upper, log, integer }
    }

    fn transform(&self, v: f64) -> f64 {
        if self.log {
            v.ln()
        } else {
            v
        }
    }

    /// Min-max image of `v` in `[0, 1]`, on the log scale where flagged.
    pub fn to_unit(&self, v: f64) -> f64 {
        let lo = self.transform(self.lower);
        let hi = self.transform(self.upper);
        ((self.transform(v) - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    /// Inverse of [`to_unit`](Self::to_unit); integers are rounded to the nearest value.
    pub fn from_unit(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let lo = self.transform(self.lower);
        let hi = self.transform(self.upper);
        let t = lo + u * (hi - lo);
        let mut v = if self.log { t.exp() } else { t };
        if self.integer {
            v = v.round();
        }
        v.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper && (!self.integer || v.fract() == 0.0)
    }
}

/// The boosting search space, in field order of [`HyperparamConfig`].
pub const SEARCH_SPACE: [ParamSpec; 10] = [
    ParamSpec::new("nrounds", 1.0, 5000.0, true, true),
    ParamSpec::new("eta", 1e-4, 1.0, true, false),
    ParamSpec::new("lambda", 1e-4, 1000.0, true, false),
    ParamSpec::new("gamma", 1e-4, 7.0, true, false),
    ParamSpec::new("alpha", 1e-4, 1000.0, true, false),
    ParamSpec::new("subsample", 0.1, 1.0, false, false),
    ParamSpec::new("max_depth", 1.0, 20.0, false, true),
    ParamSpec::new("min_child_weight", 1.0, 150.0, true, false),
    ParamSpec::new("colsample_bytree", 0.01, 1.0, false, false),
    ParamSpec::new("colsample_bylevel", 0.01, 1.0, false, false),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperparamConfig {
    pub nrounds: u32,
    pub eta: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub subsample: f64,
    pub max_depth: u32,
    pub min_child_weight: f64,
    pub colsample_bytree: f64,
    pub colsample_bylevel: f64,
}

impl Default for HyperparamConfig {
    fn default() -> Self {
        Self {
            nrounds: 100,
            eta: 0.3,
            lambda: 1.0,
            gamma: 1e-4,
            alpha: 1e-4,
            subsample: 1.0,
            max_depth: 6,
            min_child_weight: std::f64::consts::E,
            colsample_bytree: 1.0,
            colsample_bylevel: 1.0,
        }
    }
}

impl HyperparamConfig {
    pub const N_PARAMS: usize = SEARCH_SPACE.len();

    pub fn get(&self, i: usize) -> f64 {
        match i {
            0 => self.nrounds as f64,
            1 => self.eta,
            2 => self.lambda,
            3 => self.gamma,
            4 => self.alpha,
            5 => self.subsample,
            6 => self.max_depth as f64,
            7 => self.min_child_weight,
            8 => self.colsample_bytree,
            9 => self.colsample_bylevel,
            _ => panic!("hyperparameter index {i} out of range"),
        }
    }

    pub fn set(&mut self, i: usize, v: f64) {
        match i {
            0 => self.nrounds = v.round() as u32,
            1 => self.eta = v,
            2 => self.lambda = v,
            3 => self.gamma = v,
            4 => self.alpha = v,
            5 => self.subsample = v,
            6 => self.max_depth = v.round() as u32,
            7 => self.min_child_weight = v,
            8 => self.colsample_bytree = v,
            9 => self.colsample_bylevel = v,
            _ => panic!("hyperparameter index {i} out of range"),
        }
    }

    /// Names of fields outside their range.
    pub fn out_of_range(&self) -> Vec<&'static str> {
        SEARCH_SPACE
            .iter()
            .enumerate()
            .filter(|(i, spec)| !spec.contains(self.get(*i)))
            .map(|(_, spec)| spec.name)
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.out_of_range().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_in_range() {
        let hp = HyperparamConfig::default();
        assert!(hp.is_valid());
        assert_eq!(hp.eta, 0.3);
        assert_eq!(hp.max_depth, 6);
        assert_eq!(hp.min_child_weight, std::f64::consts::E);
    }

    #[test]
    fn log_scale_unit_image() {
        // ln(100) / ln(5000), the lower bound being ln(1) = 0
        let u = SEARCH_SPACE[0].to_unit(100.0);
        assert!((u - 100f64.ln() / 5000f64.ln()).abs() < 1e-15);
        assert!((u - 0.5406).abs() < 1e-4);
        assert_eq!(SEARCH_SPACE[0].from_unit(u), 100.0);
    }

    #[test]
    fn unit_round_trip_continuous() {
        for spec in SEARCH_SPACE.iter().filter(|s| !s.integer) {
            for &u in &[0.0, 0.13, 0.5, 0.77, 1.0] {
                let v = spec.from_unit(u);
                assert!(spec.contains(v), "{} {v}", spec.name);
                assert!((spec.to_unit(v) - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn get_set_cover_all_fields() {
        let mut hp = HyperparamConfig::default();
        for i in 0..HyperparamConfig::N_PARAMS {
            let v = SEARCH_SPACE[i].upper;
            hp.set(i, v);
            assert_eq!(hp.get(i), v);
        }
        assert!(hp.is_valid());
        hp.eta = 2.0;
        assert_eq!(hp.out_of_range(), vec!["eta"]);
    }
}
