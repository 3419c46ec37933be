//! Deterministic synthetic vendor-panel generator.
//!
//! Stands in for real platform logs in tests and demos. The generative model
//! is an invention of this crate, not a fit to any real data set:
//!
//! * `Post_t ~ Poisson(base * week(t) * event(t))`
//! * `Repost_t, Comment_t ~ Poisson(alpha * Post_t + base)` with `alpha`
//!   taken from the coupling entries `(post -> repost)` / `(post -> comment)`
//! * `EPA_t ~ Poisson(base * week(t) * event(t) * exp(sum_s beta_{s,e} *
//!   z_s(t - L)))` where `z_s` standardizes SMA stream `s` over the full
//!   generated history and `L` is `lag_days`
//!
//! When `noise_scale > 0`, every intensity is additionally multiplied by
//! `exp(noise_scale * g)` with `g` a standard normal draw, adding lognormal
//! overdispersion without linking streams.
//!
//! Every draw comes from a SplitMix64 generator keyed by
//! `(seed, stream index, day)`, so equal configs produce bit-identical
//! panels on any platform and stream generation order is irrelevant.
//! Transcendentals go through `libm` to pin results across platforms.

use std::collections::BTreeMap;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::date::Date;
use crate::error::{Error, Result};
use crate::panel::{ActivityType, DailySeries, VendorPanel};
use crate::rng::SplitMix64;

/// Intensities above this use the normal approximation instead of inversion
/// by sequential search.
pub const POISSON_INVERSION_CUTOFF: f64 = 64.0;

/// A one-day multiplicative demand spike (models platform-wide sale events).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpike {
    /// Day offset from the panel start.
    pub offset: u32,
    /// Intensity multiplier applied on that day, > 0.
    pub multiplier: f64,
}

/// One directed coupling term between streams.
///
/// `source` must be an SMA type. EPA targets respond with coefficient `beta`
/// in the exponential tilt; `repost`/`comment` targets respond linearly to
/// same-day `post` volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub source: ActivityType,
    pub target: ActivityType,
    pub beta: f64,
}

fn default_start_date() -> Date {
    Date::from_ymd_opt(2016, 1, 1).unwrap()
}

fn default_vendor_id() -> String {
    "v01".into()
}

fn default_category() -> String {
    crate::panel::UNCATEGORIZED.into()
}

fn default_base_rates() -> BTreeMap<ActivityType, f64> {
    [
        (ActivityType::Post, 3.0),
        (ActivityType::Repost, 40.0),
        (ActivityType::Comment, 60.0),
        (ActivityType::Search, 120.0),
        (ActivityType::Clickthrough, 80.0),
        (ActivityType::Order, 25.0),
    ]
    .into_iter()
    .collect()
}

fn default_weekly_profile() -> [f64; 7] {
    [1.0, 0.95, 0.9, 0.95, 1.05, 1.25, 1.2]
}

/// Full specification of one synthetic panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    /// Panel length in days; must be at least `lag_days + 30`.
    pub days: u32,
    #[serde(default = "default_start_date")]
    pub start_date: Date,
    #[serde(default = "default_vendor_id")]
    pub vendor_id: String,
    #[serde(default = "default_category")]
    pub category: String,
    /// Expected daily count per stream before seasonal/event scaling.
    #[serde(default = "default_base_rates")]
    pub base_rates: BTreeMap<ActivityType, f64>,
    /// Multipliers indexed by weekday (Monday first).
    #[serde(default = "default_weekly_profile")]
    pub weekly_profile: [f64; 7],
    #[serde(default)]
    pub event_days: Vec<EventSpike>,
    #[serde(default)]
    pub coupling: Vec<Coupling>,
    /// Delay, in days, between an SMA signal and its EPA response.
    #[serde(default)]
    pub lag_days: u32,
    /// Lognormal overdispersion scale, >= 0.
    #[serde(default)]
    pub noise_scale: f64,
}

impl SynthConfig {
    /// Minimal config with library defaults for everything but seed/length.
    pub fn new(seed: u64, days: u32) -> Self {
        Self {
            seed,
            days,
            start_date: default_start_date(),
            vendor_id: default_vendor_id(),
            category: default_category(),
            base_rates: default_base_rates(),
            weekly_profile: default_weekly_profile(),
            event_days: Vec::new(),
            coupling: Vec::new(),
            lag_days: 0,
            noise_scale: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.days < self.lag_days + 30 {
            return Err(Error::Config(format!(
                "days ({}) must be at least lag_days + 30 ({})",
                self.days,
                self.lag_days + 30
            )));
        }
        if self.weekly_profile.iter().any(|&m| m.is_nan() || m <= 0.0) {
            return Err(Error::Config(
                "weekly_profile multipliers must be > 0".into(),
            ));
        }
        for &t in &ActivityType::ALL {
            match self.base_rates.get(&t) {
                Some(rate) if *rate > 0.0 && rate.is_finite() => {}
                Some(_) => {
                    return Err(Error::Config(format!("base rate for {t} must be positive")))
                }
                None => return Err(Error::Config(format!("missing base rate for {t}"))),
            }
        }
        for spike in &self.event_days {
            if spike.multiplier.is_nan() || spike.multiplier <= 0.0 {
                return Err(Error::Config("event multipliers must be > 0".into()));
            }
            if spike.offset >= self.days {
                return Err(Error::Config(format!(
                    "event offset {} beyond panel length {}",
                    spike.offset, self.days
                )));
            }
        }
        if self.noise_scale.is_nan() || self.noise_scale < 0.0 {
            return Err(Error::Config("noise_scale must be >= 0".into()));
        }
        for c in &self.coupling {
            if !c.beta.is_finite() {
                return Err(Error::Config("coupling coefficients must be finite".into()));
            }
            let valid = (c.source.is_sma() && c.target.is_epa())
                || (c.source == ActivityType::Post
                    && matches!(c.target, ActivityType::Repost | ActivityType::Comment));
            if !valid {
                return Err(Error::Config(format!(
                    "unsupported coupling {} -> {}",
                    c.source, c.target
                )));
            }
        }
        Ok(())
    }

    fn coupling_coefficient(&self, source: ActivityType, target: ActivityType) -> f64 {
        self.coupling
            .iter()
            .filter(|c| c.source == source && c.target == target)
            .map(|c| c.beta)
            .sum()
    }
}

/// Standard normal via Box-Muller; `libm` keeps it platform-stable.
fn standard_normal(rng: &mut SplitMix64) -> f64 {
    let u1 = rng.next_open_f64();
    let u2 = rng.next_f64();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(std::f64::consts::TAU * u2)
}

/// Poisson draw: inversion by sequential search below
/// [`POISSON_INVERSION_CUTOFF`], rounded normal approximation above it.
fn poisson(rng: &mut SplitMix64, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda <= POISSON_INVERSION_CUTOFF {
        let u = rng.next_f64();
        let mut p = libm::exp(-lambda);
        let mut cum = p;
        let mut k = 0u64;
        while u > cum {
            k += 1;
            p *= lambda / k as f64;
            cum += p;
            if p == 0.0 || k > 2_000 {
                break;
            }
        }
        k
    } else {
        let z = standard_normal(rng);
        let value = libm::round(lambda + libm::sqrt(lambda) * z);
        if value < 0.0 {
            0
        } else {
            value as u64
        }
    }
}

fn intensity_tilt(config: &SynthConfig, rng: &mut SplitMix64) -> f64 {
    if config.noise_scale > 0.0 {
        libm::exp(config.noise_scale * standard_normal(rng))
    } else {
        1.0
    }
}

fn weekday_index(date: Date) -> usize {
    date.weekday().num_days_from_monday() as usize
}

/// Generates one synthetic vendor panel. Pure function of the config.
pub fn generate(config: &SynthConfig) -> Result<VendorPanel> {
    config.validate()?;
    let days = config.days as usize;
    let mut event = vec![1.0f64; days];
    for spike in &config.event_days {
        event[spike.offset as usize] *= spike.multiplier;
    }
    let week: Vec<f64> = (0..days)
        .map(|d| {
            config.weekly_profile[weekday_index(crate::date::add_days(config.start_date, d as u64))]
        })
        .collect();

    // SMA first: posts drive reposts/comments, and the standardized SMA
    // history feeds the EPA intensities.
    let mut sma: BTreeMap<ActivityType, Vec<u64>> = BTreeMap::new();
    let post: Vec<u64> = (0..days)
        .map(|d| {
            let mut rng =
                SplitMix64::keyed(config.seed, &[ActivityType::Post.index() as u64, d as u64]);
            let lambda = config.base_rates[&ActivityType::Post]
                * week[d]
                * event[d]
                * intensity_tilt(config, &mut rng);
            poisson(&mut rng, lambda)
        })
        .collect();
    for &t in &[ActivityType::Repost, ActivityType::Comment] {
        let alpha = config.coupling_coefficient(ActivityType::Post, t);
        let values: Vec<u64> = (0..days)
            .map(|d| {
                let mut rng = SplitMix64::keyed(config.seed, &[t.index() as u64, d as u64]);
                let lambda = (alpha * post[d] as f64 + config.base_rates[&t])
                    * intensity_tilt(config, &mut rng);
                poisson(&mut rng, lambda)
            })
            .collect();
        sma.insert(t, values);
    }
    sma.insert(ActivityType::Post, post);

    // Per-stream standardization over the generated history.
    let z_scores: BTreeMap<ActivityType, Vec<f64>> = sma
        .iter()
        .map(|(&t, values)| {
            let n = values.len() as f64;
            let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
            let var = values
                .iter()
                .map(|&v| {
                    let d = v as f64 - mean;
                    d * d
                })
                .sum::<f64>()
                / n;
            let std = libm::sqrt(var);
            let z = values
                .iter()
                .map(|&v| {
                    if std > 0.0 {
                        (v as f64 - mean) / std
                    } else {
                        0.0
                    }
                })
                .collect();
            (t, z)
        })
        .collect();

    let lag = config.lag_days as usize;
    let mut streams: BTreeMap<ActivityType, DailySeries> = BTreeMap::new();
    for &e in &ActivityType::EPA {
        let values: Vec<u64> = (0..days)
            .map(|d| {
                let mut rng = SplitMix64::keyed(config.seed, &[e.index() as u64, d as u64]);
                let mut tilt_exponent = 0.0;
                if d >= lag {
                    for &s in &ActivityType::SMA {
                        let beta = config.coupling_coefficient(s, e);
                        if beta != 0.0 {
                            tilt_exponent += beta * z_scores[&s][d - lag];
                        }
                    }
                }
                let lambda = config.base_rates[&e]
                    * week[d]
                    * event[d]
                    * libm::exp(tilt_exponent)
                    * intensity_tilt(config, &mut rng);
                poisson(&mut rng, lambda)
            })
            .collect();
        streams.insert(e, DailySeries::new(config.start_date, values)?);
    }
    for (&t, values) in &sma {
        streams.insert(t, DailySeries::new(config.start_date, values.clone())?);
    }

    VendorPanel::new(config.vendor_id.clone(), config.category.clone(), streams)
}

fn default_vendors() -> u32 {
    1
}

fn default_rate_jitter() -> f64 {
    0.35
}

/// Categories cycled across generated vendors.
pub const FLEET_CATEGORIES: [&str; 5] = ["P/E", "Sports", "Food", "Clothes", "Home"];

/// Specification for a fleet of vendors sharing one generative template.
///
/// Vendor `i` receives a derived seed and a deterministic lognormal scaling
/// of its base rates, and categories cycle through [`FLEET_CATEGORIES`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetConfig {
    pub seed: u64,
    pub days: u32,
    #[serde(default = "default_vendors")]
    pub vendors: u32,
    #[serde(default = "default_start_date")]
    pub start_date: Date,
    #[serde(default = "default_base_rates")]
    pub base_rates: BTreeMap<ActivityType, f64>,
    #[serde(default = "default_weekly_profile")]
    pub weekly_profile: [f64; 7],
    #[serde(default)]
    pub event_days: Vec<EventSpike>,
    #[serde(default)]
    pub coupling: Vec<Coupling>,
    #[serde(default)]
    pub lag_days: u32,
    #[serde(default)]
    pub noise_scale: f64,
    /// Spread of per-vendor base-rate scaling, >= 0.
    #[serde(default = "default_rate_jitter")]
    pub rate_jitter: f64,
}

impl FleetConfig {
    pub fn new(seed: u64, vendors: u32, days: u32) -> Self {
        Self {
            seed,
            days,
            vendors,
            start_date: default_start_date(),
            base_rates: default_base_rates(),
            weekly_profile: default_weekly_profile(),
            event_days: Vec::new(),
            coupling: Vec::new(),
            lag_days: 0,
            noise_scale: 0.0,
            rate_jitter: default_rate_jitter(),
        }
    }

    /// Per-vendor config for vendor index `i` (0-based).
    pub fn vendor_config(&self, i: u32) -> SynthConfig {
        let mut rng = SplitMix64::keyed(self.seed, &[0xF1EE7, i as u64]);
        let scale = if self.rate_jitter > 0.0 {
            libm::exp(self.rate_jitter * standard_normal(&mut rng))
        } else {
            1.0
        };
        let base_rates = self
            .base_rates
            .iter()
            .map(|(&t, &r)| (t, r * scale))
            .collect();
        SynthConfig {
            seed: rng.next_u64(),
            days: self.days,
            start_date: self.start_date,
            vendor_id: format!("v{:02}", i + 1),
            category: FLEET_CATEGORIES[(i as usize) % FLEET_CATEGORIES.len()].to_string(),
            base_rates,
            weekly_profile: self.weekly_profile,
            event_days: self.event_days.clone(),
            coupling: self.coupling.clone(),
            lag_days: self.lag_days,
            noise_scale: self.noise_scale,
        }
    }
}

/// Generates the whole fleet in vendor order.
pub fn generate_fleet(config: &FleetConfig) -> Result<Vec<VendorPanel>> {
    if config.vendors == 0 {
        return Err(Error::Config(
            "fleet must contain at least one vendor".into(),
        ));
    }
    (0..config.vendors)
        .map(|i| generate(&config.vendor_config(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_pearson;

    fn flat_config(seed: u64) -> SynthConfig {
        let mut cfg = SynthConfig::new(seed, 730);
        cfg.weekly_profile = [1.0; 7];
        cfg
    }

    #[test]
    fn equal_configs_generate_identical_panels() {
        let cfg = SynthConfig {
            lag_days: 2,
            noise_scale: 0.3,
            coupling: vec![Coupling {
                source: ActivityType::Post,
                target: ActivityType::Search,
                beta: 1.0,
            }],
            ..SynthConfig::new(99, 120)
        };
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    }

    #[test]
    fn zero_coupling_leaves_epa_uncorrelated_with_sma() {
        let panel = generate(&flat_config(2024)).unwrap();
        let post = panel.series(ActivityType::Post).values_f64();
        let search = panel.series(ActivityType::Search).values_f64();
        let r = oracle_pearson(&post, &search).unwrap();
        assert!(r.abs() < 0.15, "expected near-zero correlation, got {r}");
    }

    #[test]
    fn zero_coupling_null_holds_across_seeds() {
        let mut quiet = 0;
        for seed in 0..100 {
            let panel = generate(&flat_config(3_000 + seed)).unwrap();
            let all_small = ActivityType::SMA.iter().all(|&s| {
                ActivityType::EPA.iter().all(|&e| {
                    let r = oracle_pearson(
                        &panel.series(s).values_f64(),
                        &panel.series(e).values_f64(),
                    )
                    .unwrap();
                    r.abs() < 0.15
                })
            });
            if all_small {
                quiet += 1;
            }
        }
        assert!(
            quiet >= 95,
            "null exceeded 0.15 in {}/100 seeds",
            100 - quiet
        );
    }

    #[test]
    fn planted_lag_three_maximizes_shifted_correlation() {
        let cfg = SynthConfig {
            lag_days: 3,
            coupling: vec![Coupling {
                source: ActivityType::Post,
                target: ActivityType::Search,
                beta: 2.0,
            }],
            ..flat_config(7)
        };
        let panel = generate(&cfg).unwrap();
        let post = panel.series(ActivityType::Post).values_f64();
        let search = panel.series(ActivityType::Search).values_f64();
        // Naive lag scan straight from the definition: shift SMA forward by
        // `lag` days and correlate over the overlap.
        let mut best = (0usize, f64::NEG_INFINITY);
        for lag in 1..=15usize {
            let n = post.len() - lag;
            let r = oracle_pearson(&post[..n], &search[lag..]).unwrap();
            if r > best.1 {
                best = (lag, r);
            }
        }
        assert_eq!(best.0, 3, "argmax lag should match the planted lag");
    }

    #[test]
    fn poisson_sample_mean_tracks_intensity() {
        let mut rng = SplitMix64::new(5);
        for &lambda in &[0.5, 3.0, 20.0, 200.0] {
            let n = 4_000;
            let mean = (0..n)
                .map(|_| poisson(&mut rng, lambda) as f64)
                .sum::<f64>()
                / n as f64;
            assert!(
                (mean - lambda).abs() < 4.0 * (lambda / n as f64).sqrt() + 0.05,
                "lambda {lambda}: sample mean {mean}"
            );
        }
    }

    #[test]
    fn config_invariants_are_enforced() {
        let mut cfg = SynthConfig::new(1, 20);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.days = 730;
        cfg.weekly_profile[3] = 0.0;
        assert!(cfg.validate().is_err());
        cfg.weekly_profile[3] = 1.0;
        cfg.base_rates.remove(&ActivityType::Order);
        assert!(cfg.validate().is_err());
        cfg.base_rates = default_base_rates();
        cfg.coupling = vec![Coupling {
            source: ActivityType::Search,
            target: ActivityType::Order,
            beta: 1.0,
        }];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn fleet_cycles_categories_and_keeps_ids_unique() {
        let fleet = generate_fleet(&FleetConfig::new(3, 7, 40)).unwrap();
        assert_eq!(fleet.len(), 7);
        assert_eq!(fleet[0].category(), "P/E");
        assert_eq!(fleet[5].category(), "P/E");
        assert_eq!(fleet[6].category(), "Sports");
        let mut ids: Vec<&str> = fleet.iter().map(|p| p.vendor_id()).collect();
        ids.dedup();
        assert_eq!(ids.len(), 7);
    }

    #[test]
    fn event_spike_inflates_that_day() {
        let mut cfg = flat_config(17);
        cfg.base_rates.insert(ActivityType::Search, 100.0);
        cfg.event_days = vec![EventSpike {
            offset: 100,
            multiplier: 50.0,
        }];
        let panel = generate(&cfg).unwrap();
        let search = panel.series(ActivityType::Search).values();
        let spiked = search[100] as f64;
        let typical = search.iter().map(|&v| v as f64).sum::<f64>() / search.len() as f64;
        assert!(
            spiked > 10.0 * typical,
            "spike day {spiked} vs typical {typical}"
        );
    }
}
