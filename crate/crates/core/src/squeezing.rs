//! Cavity quadrature-noise model: per-mode variances versus analysis
//! frequency, pump rate, eigenvalue ratio and detection efficiency, plus dB
//! conversions and the rotated-quadrature model behind phase scans.
//!
//! All variances are shot-noise normalized: vacuum = 1, squeezing < 1.

use crate::error::{Error, Result};
use crate::Real;

/// Parametric-oscillator parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SpopoParams<T: Real = f64> {
    /// Escape efficiency of the cavity, in [0, 1].
    pub zeta: T,
    /// Signal decay rate of the cavity (rad/s).
    pub gamma_s: T,
    /// Normalized amplitude pump rate, sqrt(pump power / threshold power).
    /// Below threshold this is in [0, 1); [`SpopoParams::validate`] also
    /// admits exactly 1 as the algebraic boundary, where the antisqueezed
    /// variance diverges at zero analysis frequency. [`pump_rate`] never
    /// produces the boundary.
    pub r: T,
    /// Gain eigenvalue of each mode relative to mode 0. Entry 0 must be 1
    /// and every magnitude is at most 1. A negative ratio swaps which
    /// quadrature is squeezed; see [`quadrature_variances`].
    pub lambda_ratios: Vec<T>,
}

impl<T: Real> SpopoParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.zeta >= T::zero() && self.zeta <= T::one()) {
            return Err(Error::invalid("zeta", format!("must be in [0, 1], got {}", self.zeta)));
        }
        if !(self.gamma_s > T::zero()) {
            return Err(Error::invalid("gamma_s", format!("must be positive, got {}", self.gamma_s)));
        }
        if !(self.r >= T::zero() && self.r <= T::one()) {
            return Err(Error::invalid("r", format!("must be in [0, 1], got {}", self.r)));
        }
        match self.lambda_ratios.first() {
            Some(first) if *first == T::one() => {}
            _ => {
                return Err(Error::invalid(
                    "lambda_ratios",
                    "first entry must be present and exactly 1",
                ))
            }
        }
        for (k, ratio) in self.lambda_ratios.iter().enumerate() {
            if !(ratio.abs() <= T::one()) {
                return Err(Error::invalid(
                    "lambda_ratios",
                    format!("entry {k} has magnitude above 1: {ratio}"),
                ));
            }
        }
        Ok(())
    }
}

/// Normalized pump rate sqrt(power/threshold). Errors at or above threshold,
/// where the below-threshold noise model stops being valid.
pub fn pump_rate<T: Real>(power: T, threshold: T) -> Result<T> {
    if !(threshold > T::zero()) {
        return Err(Error::invalid("threshold", format!("must be positive, got {threshold}")));
    }
    if !(power >= T::zero()) {
        return Err(Error::invalid("power", format!("must be non-negative, got {power}")));
    }
    if power >= threshold {
        return Err(Error::AboveThreshold {
            power: power.to_f64().unwrap_or(f64::NAN),
            threshold: threshold.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((power / threshold).sqrt())
}

/// Detection efficiencies between cavity output and recorded photocurrent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionChain<T: Real = f64> {
    /// Photodiode quantum efficiency, in [0, 1].
    pub rho: T,
    /// Propagation efficiency, in [0, 1].
    pub eta: T,
    /// Homodyne interference visibility, in [0, 1].
    pub xi: T,
    /// When set, used verbatim instead of rho*eta*xi^2. Lets a measured
    /// total efficiency be applied when the individual factors do not
    /// account for every loss.
    pub eta_tot_override: Option<T>,
}

impl<T: Real> DetectionChain<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |name, v: T| {
            if v >= T::zero() && v <= T::one() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be in [0, 1], got {v}")))
            }
        };
        unit("rho", self.rho)?;
        unit("eta", self.eta)?;
        unit("xi", self.xi)?;
        if let Some(o) = self.eta_tot_override {
            unit("eta_tot_override", o)?;
        }
        Ok(())
    }

    /// Total detection efficiency rho*eta*xi^2, or the override if set.
    pub fn eta_tot(&self) -> T {
        self.eta_tot_override
            .unwrap_or(self.rho * self.eta * self.xi * self.xi)
    }
}

/// Shot-noise-normalized variances of one mode at one analysis frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePair<T: Real = f64> {
    /// Phase-quadrature variance.
    pub var_p: T,
    /// Amplitude-quadrature variance.
    pub var_q: T,
    /// Analysis frequency (rad/s).
    pub omega: T,
    /// Mode index.
    pub k: usize,
    /// True when a negative eigenvalue ratio swapped which quadrature is
    /// squeezed (var_p and var_q already reflect the swap).
    pub quadratures_swapped: bool,
}

/// Below-threshold variances of mode `k` at analysis frequency `omega`.
///
/// With rho_k = r*|ratio_k|, g = gamma_s and the detected fraction
/// zeta*eta_tot:
///
///   var_p = 1 - zeta*eta_tot * (g^2(1+rho_k)^2 - g^2(1-rho_k)^2) / (g^2(1+rho_k)^2 + omega^2)
///   var_q = 1 + zeta*eta_tot * (g^2(1+rho_k)^2 - g^2(1-rho_k)^2) / (g^2(1-rho_k)^2 + omega^2)
///
/// A negative ratio_k flips the sign of rho_k, which exchanges the two
/// expressions; the result reports the exchanged pair together with the
/// `quadratures_swapped` flag.
pub fn quadrature_variances<T: Real>(
    k: usize,
    omega: T,
    spopo: &SpopoParams<T>,
    chain: &DetectionChain<T>,
) -> Result<QuadraturePair<T>> {
    spopo.validate()?;
    chain.validate()?;
    if !(omega >= T::zero()) {
        return Err(Error::invalid("omega", format!("must be non-negative, got {omega}")));
    }
    let ratio = *spopo
        .lambda_ratios
        .get(k)
        .ok_or(Error::ModeIndexOutOfRange {
            k,
            len: spopo.lambda_ratios.len(),
        })?;
    let swapped = ratio < T::zero();
    let rho_k = spopo.r * ratio.abs();

    let g2 = spopo.gamma_s * spopo.gamma_s;
    let one = T::one();
    let plus = g2 * (one + rho_k) * (one + rho_k);
    let minus = g2 * (one - rho_k) * (one - rho_k);
    let numerator = spopo.zeta * chain.eta_tot() * (plus - minus);
    let o2 = omega * omega;
    let squeezed = one - numerator / (plus + o2);
    let antisqueezed = one + numerator / (minus + o2);

    let (var_p, var_q) = if swapped {
        (antisqueezed, squeezed)
    } else {
        (squeezed, antisqueezed)
    };
    Ok(QuadraturePair {
        var_p,
        var_q,
        omega,
        k,
        quadratures_swapped: swapped,
    })
}

/// Variance to decibels, 10*log10(v).
///
/// Sign convention: a squeezed variance gives a negative result. Quoted
/// positive "dB of squeezing" therefore corresponds to a variance of
/// 10^(-dB/10), see [`db_to_variance`].
pub fn variance_to_db<T: Real>(v: T) -> Result<T> {
    if !(v > T::zero()) {
        return Err(Error::invalid("v", format!("must be positive, got {v}")));
    }
    Ok(T::lit(10.0) * v.log10())
}

/// Decibels to variance, 10^(d/10). Inverse of [`variance_to_db`].
pub fn db_to_variance<T: Real>(d: T) -> T {
    T::lit(10.0).powf(d / T::lit(10.0))
}

/// Variance measured along the readout angle theta relative to the
/// amplitude quadrature: var_q*cos^2(theta) + var_p*sin^2(theta).
/// Pi-periodic and bounded by [min(var_p, var_q), max(var_p, var_q)].
pub fn rotated_variance<T: Real>(theta: T, pair: &QuadraturePair<T>) -> T {
    let c = theta.cos();
    let s = theta.sin();
    pair.var_q * c * c + pair.var_p * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn spopo() -> SpopoParams {
        SpopoParams {
            zeta: 0.814,
            gamma_s: 9.817477042468103e6,
            r: 0.7006490497453707,
            lambda_ratios: vec![1.0, -0.7, 0.5, -0.35],
        }
    }

    fn chain() -> DetectionChain {
        DetectionChain {
            rho: 0.93,
            eta: 0.98,
            xi: 0.89,
            eta_tot_override: None,
        }
    }

    #[test]
    fn pump_rate_matches_hand_values() {
        assert_relative_eq!(
            pump_rate(27e-3, 55e-3).unwrap(),
            0.7006490497453707,
            max_relative = 1e-12
        );
        assert_eq!(pump_rate(0.0, 55e-3).unwrap(), 0.0);
        assert_relative_eq!(pump_rate(1.0, 4.0).unwrap(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn pump_rate_rejects_at_and_above_threshold() {
        assert!(matches!(
            pump_rate(55e-3, 55e-3),
            Err(Error::AboveThreshold { .. })
        ));
        assert!(pump_rate(60e-3, 55e-3).is_err());
        assert!(pump_rate(1.0, 0.0).is_err());
        assert!(pump_rate(-1.0, 1.0).is_err());
    }

    #[test]
    fn total_efficiency_is_the_product_of_factors() {
        assert_relative_eq!(chain().eta_tot(), 0.72191994, max_relative = 1e-9);
        let overridden = DetectionChain {
            eta_tot_override: Some(0.68),
            ..chain()
        };
        assert_eq!(overridden.eta_tot(), 0.68);
    }

    #[test]
    fn chain_validation_bounds_each_factor() {
        let mut c = chain();
        c.xi = 1.2;
        assert!(c.validate().is_err());
        let mut c = chain();
        c.eta_tot_override = Some(-0.1);
        assert!(c.validate().is_err());
        assert!(chain().validate().is_ok());
    }

    #[test]
    fn zero_pump_gives_vacuum() {
        let mut p = spopo();
        p.r = 0.0;
        let v = quadrature_variances(0, 1e6, &p, &chain()).unwrap();
        assert_eq!(v.var_p, 1.0);
        assert_eq!(v.var_q, 1.0);
        assert!(!v.quadratures_swapped);
    }

    #[test]
    fn threshold_boundary_has_closed_form_floor() {
        // r = 1, ratio 1, omega 0: squeezed variance bottoms out at
        // 1 - zeta*eta_tot and the antisqueezed one diverges.
        let mut p = spopo();
        p.r = 1.0;
        let v = quadrature_variances(0, 0.0, &p, &chain()).unwrap();
        assert_relative_eq!(
            v.var_p,
            1.0 - 0.814 * 0.72191994,
            max_relative = 1e-12
        );
        assert!(v.var_q.is_infinite());
    }

    #[test]
    fn variances_match_frozen_point() {
        let v = quadrature_variances(
            0,
            2.0 * std::f64::consts::PI * 2e6,
            &spopo(),
            &chain(),
        )
        .unwrap();
        assert_relative_eq!(v.var_p, 0.6364889967822636, max_relative = 1e-12);
        assert_relative_eq!(v.var_q, 1.9530758618704958, max_relative = 1e-12);
    }

    #[test]
    fn large_analysis_frequency_returns_to_vacuum() {
        let p = spopo();
        let c = chain();
        let rho_k = p.r;
        let omega = 100.0 * p.gamma_s * (1.0 + rho_k);
        let v = quadrature_variances(0, omega, &p, &c).unwrap();
        let budget = 1e-3 * p.zeta * c.eta_tot();
        assert!((v.var_p - 1.0).abs() < budget);
        assert!((v.var_q - 1.0).abs() < budget);
    }

    #[test]
    fn negative_ratio_swaps_the_squeezed_quadrature() {
        let p = spopo();
        let c = chain();
        let neg = quadrature_variances(1, 1e6, &p, &c).unwrap();
        assert!(neg.quadratures_swapped);
        assert!(neg.var_p > 1.0 && neg.var_q < 1.0);

        let mut mirrored = p.clone();
        mirrored.lambda_ratios[1] = 0.7;
        let pos = quadrature_variances(1, 1e6, &mirrored, &c).unwrap();
        assert!(!pos.quadratures_swapped);
        assert_eq!(pos.var_p, neg.var_q);
        assert_eq!(pos.var_q, neg.var_p);
    }

    #[test]
    fn mode_index_is_bounds_checked() {
        assert!(matches!(
            quadrature_variances(4, 1e6, &spopo(), &chain()),
            Err(Error::ModeIndexOutOfRange { k: 4, len: 4 })
        ));
    }

    #[test]
    fn spopo_validation_rejects_bad_ratio_lists() {
        let mut p = spopo();
        p.lambda_ratios[0] = 0.9;
        assert!(p.validate().is_err());
        let mut p = spopo();
        p.lambda_ratios = vec![];
        assert!(p.validate().is_err());
        let mut p = spopo();
        p.lambda_ratios[2] = 1.4;
        assert!(p.validate().is_err());
        let mut p = spopo();
        p.r = 1.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn db_conversions_match_hand_values() {
        assert_eq!(variance_to_db(1.0).unwrap(), 0.0);
        assert_relative_eq!(db_to_variance(-1.5), 0.7079457843841379, max_relative = 1e-12);
        assert_relative_eq!(db_to_variance(-3.0), 0.5011872336272722, max_relative = 1e-12);
        assert_relative_eq!(db_to_variance(0.6 * 10.0), 3.9810717055349722, max_relative = 1e-12);
        assert!(variance_to_db(0.0).is_err());
        assert!(variance_to_db(-2.0).is_err());
    }

    #[test]
    fn db_conversions_round_trip() {
        for v in [1e-3, 0.5011872336272722, 1.0, 2.5, 3.981] {
            let db = variance_to_db(v).unwrap();
            assert_relative_eq!(db_to_variance(db), v, max_relative = 1e-12);
        }
    }

    #[test]
    fn rotated_variance_hits_the_axes() {
        let pair = QuadraturePair {
            var_p: 0.5,
            var_q: 4.0,
            omega: 0.0,
            k: 0,
            quadratures_swapped: false,
        };
        assert_eq!(rotated_variance(0.0, &pair), 4.0);
        assert_abs_diff_eq!(
            rotated_variance(std::f64::consts::FRAC_PI_2, &pair),
            0.5,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            rotated_variance(std::f64::consts::FRAC_PI_4, &pair),
            2.25,
            epsilon = 1e-14
        );
    }

    #[test]
    fn single_precision_variances_agree_with_double() {
        let p32 = SpopoParams::<f32> {
            zeta: 0.814,
            gamma_s: 9.817477e6,
            r: 0.700_649,
            lambda_ratios: vec![1.0, -0.7],
        };
        let c32 = DetectionChain::<f32> {
            rho: 0.93,
            eta: 0.98,
            xi: 0.89,
            eta_tot_override: None,
        };
        let v = quadrature_variances(0, 12.566371e6, &p32, &c32).unwrap();
        assert!((v.var_p - 0.636489).abs() < 1e-4);
    }
}
