//! Synthetic household data shaped like an ACS extract, with a binary
//! Medicaid target.
//!
//! Each household first draws a latent low-income flag (income below
//! [`INCOME_THRESHOLD`]). Household size, age, interest income and disability
//! flags are drawn around it; household income is drawn on the matching side
//! of the threshold, and `poverty_status` compares it against a size-scaled
//! poverty line. The target is a thresholded linear score of the latent flag
//! and the visible features, with symmetric label noise.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, LogNormal, Normal, Poisson};
use thiserror::Error;

use crate::dataset::{Dataset, FeatureSpec, Kind};

pub const INCOME_THRESHOLD: f64 = 20_000.0;
pub const MIN_ROWS: usize = 10;

/// Column names in output order.
pub const COLUMNS: [&str; 17] = [
    "age",
    "sex",
    "race",
    "state",
    "region",
    "division",
    "household_size",
    "num_children",
    "class_of_worker",
    "interest_income",
    "dis_hearing",
    "dis_vision",
    "dis_cognitive",
    "dis_ambulatory",
    "household_income",
    "poverty_status",
    "medicaid",
];

const BINARY: [&str; 6] = [
    "sex",
    "dis_hearing",
    "dis_vision",
    "dis_cognitive",
    "dis_ambulatory",
    "poverty_status",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(&'static str),
}

/// Coefficients of the target score
/// `protected*low + age*z_age - interest*z_interest + disability*sum(dis) + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthEffects {
    pub protected: f64,
    pub age: f64,
    pub interest: f64,
    pub disability: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Share of households with income below the threshold.
    pub prevalence: f64,
    /// Probability of flipping each label.
    pub noise: f64,
    /// Mean age difference (years) of low-income households, subtracted.
    pub age_gap: f64,
    /// Standardized interest-income shift of low-income households, subtracted.
    pub interest_shift: f64,
    /// Correlation of standardized interest income with standardized age.
    pub interest_age_corr: f64,
    /// Extra expected household members for low-income households.
    pub household_proxy: f64,
    pub effects: SynthEffects,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            prevalence: 0.92,
            noise: 0.03,
            age_gap: -0.3,
            interest_shift: -0.35,
            interest_age_corr: 0.9,
            household_proxy: 0.0,
            effects: SynthEffects {
                protected: 1.3,
                age: 2.0,
                interest: 2.8,
                disability: 0.5,
                intercept: -1.6,
            },
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.prevalence > 0.0 && self.prevalence < 1.0) {
            return Err(SynthError::InvalidConfig("prevalence must lie in (0, 1)"));
        }
        if !(self.noise >= 0.0 && self.noise < 0.5) {
            return Err(SynthError::InvalidConfig("noise must lie in [0, 0.5)"));
        }
        if !(-1.0..=1.0).contains(&self.interest_age_corr) {
            return Err(SynthError::InvalidConfig("interest_age_corr must lie in [-1, 1]"));
        }
        if !(self.household_proxy >= 0.0 && self.household_proxy.is_finite()) {
            return Err(SynthError::InvalidConfig("household_proxy must be nonnegative"));
        }
        let e = &self.effects;
        let all = [
            self.age_gap,
            self.interest_shift,
            e.protected,
            e.age,
            e.interest,
            e.disability,
            e.intercept,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SynthError::InvalidConfig("effects must be finite"));
        }
        Ok(())
    }
}

/// Poverty line for a household of `size` people.
pub fn poverty_line(size: f64) -> f64 {
    13_000.0 + 4_500.0 * (size - 1.0)
}

/// Generates `n` households. Deterministic in `(n, seed, cfg)`.
pub fn synth_acs(n: usize, seed: u64, cfg: &SynthConfig) -> Result<Dataset, SynthError> {
    if n < MIN_ROWS {
        return Err(SynthError::InvalidConfig("n must be at least 10"));
    }
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("valid");
    let above = LogNormal::new(0.6, 0.7).expect("valid");
    let rho = cfg.interest_age_corr;
    let resid = libm::sqrt(1.0 - rho * rho);
    let e = &cfg.effects;

    let mut cols: Vec<Vec<f64>> = (0..COLUMNS.len()).map(|_| Vec::with_capacity(n)).collect();
    for _ in 0..n {
        let low = rng.random::<f64>() < cfg.prevalence;
        let lowf = if low { 1.0 } else { 0.0 };

        let lambda = 1.2 + cfg.household_proxy * 0.8 * lowf;
        let extra = Poisson::new(lambda).expect("positive rate").sample(&mut rng).min(7.0);
        let household_size = 1.0 + extra;
        let children = Binomial::new(extra as u64, 0.55).expect("valid").sample(&mut rng) as f64;

        let age_draw = 50.0 - cfg.age_gap * lowf + 15.0 * std_normal.sample(&mut rng);
        let age = libm::round(age_draw.clamp(18.0, 90.0));
        let z_age = (age - 45.0) / 15.0;

        let z_int = rho * z_age + resid * std_normal.sample(&mut rng) - cfg.interest_shift * lowf;
        let interest = libm::round((2_000.0 + 1_500.0 * z_int).max(0.0));

        let line = poverty_line(household_size);
        let income = if low {
            libm::floor(INCOME_THRESHOLD * rng.random_range(0.25..1.0))
        } else {
            libm::ceil(line.max(INCOME_THRESHOLD) * (1.0 + above.sample(&mut rng)))
        };
        let poverty = if income < line { 1.0 } else { 0.0 };

        let p_dis = 0.02 + 0.002 * (age - 18.0);
        let mut dis = [0.0; 4];
        for d in dis.iter_mut() {
            *d = if rng.random::<f64>() < p_dis { 1.0 } else { 0.0 };
        }
        let sex = if rng.random::<bool>() { 1.0 } else { 0.0 };
        let race = f64::from(rng.random_range(1u32..=9));
        let state = rng.random_range(1u32..=56);
        let class_of_worker = f64::from(rng.random_range(1u32..=8));

        // score from the stored (rounded) values
        let z_interest = (interest - 2_000.0) / 1_500.0;
        let eta = e.protected * lowf + e.age * z_age - e.interest * z_interest
            + e.disability * dis.iter().sum::<f64>()
            + e.intercept;
        let mut label = eta >= 0.0;
        if rng.random::<f64>() < cfg.noise {
            label = !label;
        }

        let row = [
            age,
            sex,
            race,
            f64::from(state),
            f64::from(1 + (state - 1) * 4 / 56),
            f64::from(1 + (state - 1) * 9 / 56),
            household_size,
            children,
            class_of_worker,
            interest,
            dis[0],
            dis[1],
            dis[2],
            dis[3],
            income,
            poverty,
            if label { 1.0 } else { 0.0 },
        ];
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }

    let specs = COLUMNS
        .iter()
        .map(|&name| {
            if name == "medicaid" {
                FeatureSpec::target(name)
            } else if BINARY.contains(&name) {
                FeatureSpec::unprotected(name, Kind::Binary)
            } else {
                FeatureSpec::unprotected(name, Kind::Numeric)
            }
        })
        .collect();
    Ok(Dataset::new(specs, cols).expect("generator emits a valid table"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let cfg = SynthConfig::default();
        let a = synth_acs(500, 7, &cfg).unwrap();
        assert_eq!(a, synth_acs(500, 7, &cfg).unwrap());
        assert_ne!(a, synth_acs(500, 8, &cfg).unwrap());
    }

    #[test]
    fn schema() {
        let d = synth_acs(50, 1, &SynthConfig::default()).unwrap();
        let names: Vec<&str> = d.specs().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, COLUMNS.to_vec());
        assert_eq!(d.target_name(), "medicaid");
        assert!(d.protected_name().is_none());
    }

    #[test]
    fn low_income_side_is_strict() {
        let cfg = SynthConfig {
            prevalence: 0.5,
            ..SynthConfig::default()
        };
        let d = synth_acs(2000, 3, &cfg).unwrap();
        let income = d.column("household_income").unwrap();
        assert!(income.iter().all(|&v| v != INCOME_THRESHOLD && v > 0.0));
        let poverty = d.column("poverty_status").unwrap();
        let size = d.column("household_size").unwrap();
        for j in 0..d.len() {
            assert_eq!(poverty[j] == 1.0, income[j] < poverty_line(size[j]));
        }
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = SynthConfig::default();
        assert!(synth_acs(9, 0, &cfg).is_err());
        cfg.prevalence = 1.0;
        assert!(synth_acs(100, 0, &cfg).is_err());
        cfg = SynthConfig {
            noise: 0.5,
            ..SynthConfig::default()
        };
        assert!(synth_acs(100, 0, &cfg).is_err());
    }
}
