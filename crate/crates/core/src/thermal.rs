//! Gibbs initialization of the oracle register.
//!
//! Temperatures are carried as the ratio `δT/T₀` with `T₀ = ε/(k ln N)`, so
//! that `e^{-ε/kT} = N^{-1/(1+δT/T₀)}` is unit-free. The database size is a
//! real number: `N = 10²³` is never enumerated, only aggregated.

use crate::error::{invalid, Result};

/// Energy level of an excited oracle state in the split spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// `1 - r`
    Low,
    /// `1 + r`
    High,
}

impl Level {
    pub fn energy(self, r: f64) -> f64 {
        match self {
            Level::Low => 1.0 - r,
            Level::High => 1.0 + r,
        }
    }
}

/// How the bulk excited states (all except `|w-1⟩` and `|w+1⟩`) are
/// distributed over the two levels. Alternating starts at `Low` on `|w+2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BulkPattern {
    AllLow,
    AllHigh,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SplitAssignment {
    /// Level of `|w-1⟩`.
    pub before: Level,
    /// Level of `|w+1⟩`.
    pub after: Level,
    pub bulk: BulkPattern,
}

impl SplitAssignment {
    /// All twelve corner assignments.
    pub fn corners() -> Vec<SplitAssignment> {
        let mut out = Vec::with_capacity(12);
        for before in [Level::Low, Level::High] {
            for after in [Level::Low, Level::High] {
                for bulk in [
                    BulkPattern::AllLow,
                    BulkPattern::AllHigh,
                    BulkPattern::Alternating,
                ] {
                    out.push(SplitAssignment {
                        before,
                        after,
                        bulk,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumModel {
    /// All excited states at energy 1.
    Degenerate,
    /// Excited states at `1 ± r`, `0 ≤ r < 1`.
    Split { r: f64, assignment: SplitAssignment },
}

impl SpectrumModel {
    pub fn validate(&self) -> Result<()> {
        if let SpectrumModel::Split { r, .. } = *self {
            if !(0.0..1.0).contains(&r) {
                return Err(invalid("r", format!("must lie in [0, 1), got {r}")));
            }
        }
        Ok(())
    }

    /// Oracle energies of every basis state for an enumerable register,
    /// with the answer at index `w`.
    pub fn energies(&self, n_states: usize, w: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if n_states < 2 {
            return Err(invalid("N", format!("must be at least 2, got {n_states}")));
        }
        if w >= n_states {
            return Err(invalid(
                "w",
                format!("must be below N = {n_states}, got {w}"),
            ));
        }
        let mut e = vec![1.0; n_states];
        e[w] = 0.0;
        if let SpectrumModel::Split { r, assignment } = *self {
            if n_states < 3 {
                return Err(invalid("N", "split spectrum needs N >= 3"));
            }
            // offsets from w: 1 = after, N-1 = before, 2..N-2 = bulk
            for offset in 2..n_states - 1 {
                let k = offset - 2;
                e[(w + offset) % n_states] = bulk_level(assignment.bulk, k).energy(r);
            }
            e[(w + 1) % n_states] = assignment.after.energy(r);
            e[(w + n_states - 1) % n_states] = assignment.before.energy(r);
        }
        Ok(e)
    }
}

pub(crate) fn bulk_level(pattern: BulkPattern, k: usize) -> Level {
    match pattern {
        BulkPattern::AllLow => Level::Low,
        BulkPattern::AllHigh => Level::High,
        BulkPattern::Alternating if k.is_multiple_of(2) => Level::Low,
        BulkPattern::Alternating => Level::High,
    }
}

/// Initial thermal state of the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    pub n_states: f64,
    pub dt_ratio: f64,
    /// When set, overrides the Gibbs ground population; excited states share
    /// the remainder uniformly.
    pub p0_override: Option<f64>,
    pub spectrum: SpectrumModel,
}

impl ThermalSpec {
    pub fn new(n_states: f64, dt_ratio: f64) -> Self {
        Self {
            n_states,
            dt_ratio,
            p0_override: None,
            spectrum: SpectrumModel::Degenerate,
        }
    }

    pub fn with_p0(n_states: f64, p0: f64) -> Self {
        Self {
            n_states,
            dt_ratio: 0.0,
            p0_override: Some(p0),
            spectrum: SpectrumModel::Degenerate,
        }
    }

    pub fn with_spectrum(mut self, spectrum: SpectrumModel) -> Self {
        self.spectrum = spectrum;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_states;
        if !(n.is_finite() && n >= 2.0) {
            return Err(invalid(
                "N",
                format!("must be a finite number >= 2, got {n}"),
            ));
        }
        match self.p0_override {
            Some(p0) if !(p0 > 0.0 && p0 <= 1.0) => {
                return Err(invalid("p0", format!("must lie in (0, 1], got {p0}")));
            }
            Some(_) => {}
            None => {
                if !(self.dt_ratio.is_finite() && self.dt_ratio >= 0.0) {
                    return Err(invalid(
                        "dT_ratio",
                        format!("must be finite and >= 0, got {}", self.dt_ratio),
                    ));
                }
            }
        }
        if let SpectrumModel::Split { .. } = self.spectrum {
            if n < 3.0 {
                return Err(invalid("N", "split spectrum needs N >= 3"));
            }
        }
        self.spectrum.validate()
    }

    /// Per-state weight of an excited state at energy `e`, relative to the
    /// ground state. Under an override all excited states weigh the same.
    pub(crate) fn relative_weight(&self, energy: f64) -> Result<f64> {
        match self.p0_override {
            Some(p0) => Ok((1.0 - p0) / p0 / (self.n_states - 1.0)),
            None => Ok(boltzmann_factor(self)?.powf(energy)),
        }
    }
}

/// `a = e^{-ε/kT} = N^{-1/(1+δT/T₀)}`.
pub fn boltzmann_factor(spec: &ThermalSpec) -> Result<f64> {
    let n = spec.n_states;
    if !(n > 1.0) {
        return Err(invalid("N", format!("must exceed 1, got {n}")));
    }
    if !(spec.dt_ratio >= 0.0) {
        return Err(invalid(
            "dT_ratio",
            format!("must be >= 0, got {}", spec.dt_ratio),
        ));
    }
    Ok((-n.ln() / (1.0 + spec.dt_ratio)).exp())
}

/// Degenerate-spectrum populations `(p₀, p₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub ground: f64,
    /// Per-state population of a degenerate excited state (energy 1).
    pub excited: f64,
}

/// Ground-state population `p₀`. Split spectra use the Boltzmann sum over
/// the two excited levels.
pub fn ground_state_population(spec: &ThermalSpec) -> Result<f64> {
    spec.validate()?;
    if let Some(p0) = spec.p0_override {
        return Ok(p0);
    }
    let z = partition_sum(spec)?;
    let p0 = 1.0 / z;
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(invalid(
            "populations",
            format!("failed to normalize (p0 = {p0})"),
        ));
    }
    Ok(p0)
}

/// `(p₀, p₁)` for the degenerate spectrum.
pub fn degenerate_populations(spec: &ThermalSpec) -> Result<Populations> {
    spec.validate()?;
    let n = spec.n_states;
    let ground = match spec.p0_override {
        Some(p0) => p0,
        None => 1.0 / (1.0 + (n - 1.0) * boltzmann_factor(spec)?),
    };
    Ok(Populations {
        ground,
        excited: (1.0 - ground) / (n - 1.0),
    })
}

/// Level counts of the excited states: `(n_low, n_high)`, as reals.
pub(crate) fn level_counts(n_states: f64, assignment: &SplitAssignment) -> (f64, f64) {
    let bulk = n_states - 3.0;
    let (mut low, mut high) = match assignment.bulk {
        BulkPattern::AllLow => (bulk, 0.0),
        BulkPattern::AllHigh => (0.0, bulk),
        BulkPattern::Alternating => ((bulk / 2.0).ceil(), (bulk / 2.0).floor()),
    };
    for level in [assignment.before, assignment.after] {
        match level {
            Level::Low => low += 1.0,
            Level::High => high += 1.0,
        }
    }
    (low, high)
}

/// `Z / e^{-E_w/kT}` summed over all states.
fn partition_sum(spec: &ThermalSpec) -> Result<f64> {
    let n = spec.n_states;
    match spec.spectrum {
        SpectrumModel::Degenerate => Ok(1.0 + (n - 1.0) * spec.relative_weight(1.0)?),
        SpectrumModel::Split { r, assignment } => {
            let (low, high) = level_counts(n, &assignment);
            Ok(
                1.0 + low * spec.relative_weight(1.0 - r)?
                    + high * spec.relative_weight(1.0 + r)?,
            )
        }
    }
}

/// Normalized populations of every basis state for an enumerable register.
pub fn state_populations(spec: &ThermalSpec, energies: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    if (energies.len() as f64 - spec.n_states).abs() > 0.5 {
        return Err(invalid(
            "N",
            format!("{} energies for N = {}", energies.len(), spec.n_states),
        ));
    }
    let mut p = Vec::with_capacity(energies.len());
    for &e in energies {
        p.push(if e == 0.0 {
            1.0
        } else {
            spec.relative_weight(e)?
        });
    }
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= z);
    Ok(p)
}

/// Characteristic temperature `T₀ = ε/(k ln N)`, in whatever units `epsilon`
/// and `k` share.
pub fn characteristic_temperature(epsilon: f64, n_states: f64, k: f64) -> Result<f64> {
    if !(n_states > 1.0) {
        return Err(invalid("N", format!("must exceed 1, got {n_states}")));
    }
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", "must be positive"));
    }
    if !(k > 0.0) {
        return Err(invalid("k", "must be positive"));
    }
    Ok(epsilon / (k * n_states.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const N23: f64 = 1e23;

    #[test]
    fn boltzmann_factor_examples() {
        let a = boltzmann_factor(&ThermalSpec::new(N23, 0.0)).unwrap();
        assert!((a / 1e-23 - 1.0).abs() < 1e-12);
        let a = boltzmann_factor(&ThermalSpec::new(N23, 1.0)).unwrap();
        assert!((a - 10f64.powf(-11.5)).abs() / a < 1e-12);
        assert!((a - 3.162_277_660_168_379_4e-12).abs() < 1e-24);
        let a = boltzmann_factor(&ThermalSpec::new(2.0, 0.0)).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        assert!(boltzmann_factor(&ThermalSpec::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn ground_population_examples() {
        let p0 = ground_state_population(&ThermalSpec::new(N23, 0.0)).unwrap();
        assert!((p0 - N23 / (2.0 * N23 - 1.0)).abs() < 1e-15);
        let p0 = ground_state_population(&ThermalSpec::new(2.0, 0.0)).unwrap();
        assert!((p0 - 2.0 / 3.0).abs() < 1e-15);
        let p0 = ground_state_population(&ThermalSpec::new(N23, 1.0)).unwrap();
        assert!((p0 - 3.162_277_660_158_379_7e-12).abs() < 1e-22);
        let p0 = ground_state_population(&ThermalSpec::with_p0(10.0, 0.3)).unwrap();
        assert_eq!(p0, 0.3);
        assert!(ground_state_population(&ThermalSpec::new(1.0, 0.0)).is_err());
        assert!(ground_state_population(&ThermalSpec::new(10.0, -0.5)).is_err());
    }

    #[test]
    fn characteristic_temperature_examples() {
        // erg and erg/K
        let t0 = characteristic_temperature(8.3e-19, N23, 1.380_649e-16).unwrap();
        assert!((t0 - 1.2e-4).abs() / 1.2e-4 < 0.1);
        // ε/k from exp(-ε/kT) = 0.02 at 4.2 K
        let eps_over_k = -(0.02f64.ln()) * 4.2;
        let t0 = characteristic_temperature(eps_over_k, N23, 1.0).unwrap();
        assert!((t0 - 0.3).abs() / 0.3 < 0.1);
        let t0 = characteristic_temperature(2f64.ln(), 2.0, 1.0).unwrap();
        assert!((t0 - 1.0).abs() < 1e-15);
        assert!(characteristic_temperature(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn split_energies_layout() {
        let a = SplitAssignment {
            before: Level::High,
            after: Level::Low,
            bulk: BulkPattern::Alternating,
        };
        let e = SpectrumModel::Split {
            r: 0.1,
            assignment: a,
        }
        .energies(8, 6)
        .unwrap();
        // w = 6, after = 7, before = 5, bulk from offset 2: 0,1,2,3,4
        assert_eq!(e[6], 0.0);
        assert_eq!(e[7], 0.9);
        assert_eq!(e[5], 1.1);
        assert_eq!(e[0], 0.9);
        assert_eq!(e[1], 1.1);
        assert_eq!(e[2], 0.9);
        assert_eq!(e[3], 1.1);
        assert_eq!(e[4], 0.9);
        assert!(SpectrumModel::Split {
            r: 1.0,
            assignment: a
        }
        .validate()
        .is_err());
    }

    #[test]
    fn level_counts_match_enumeration() {
        for n in 3..12usize {
            for a in SplitAssignment::corners() {
                let e = SpectrumModel::Split {
                    r: 0.2,
                    assignment: a,
                }
                .energies(n, 0)
                .unwrap();
                let low = e.iter().filter(|&&x| x == 0.8).count() as f64;
                let high = e.iter().filter(|&&x| x == 1.2).count() as f64;
                assert_eq!(level_counts(n as f64, &a), (low, high), "n={n} {a:?}");
            }
        }
    }

    #[test]
    fn split_with_zero_gap_is_degenerate() {
        for a in SplitAssignment::corners() {
            for &(n, dt) in &[(16.0, 0.0), (N23, 1.0), (1e6, 3.0)] {
                let deg = ground_state_population(&ThermalSpec::new(n, dt)).unwrap();
                let split = ground_state_population(&ThermalSpec::new(n, dt).with_spectrum(
                    SpectrumModel::Split {
                        r: 0.0,
                        assignment: a,
                    },
                ))
                .unwrap();
                assert!((deg - split).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn enumerated_populations_normalize() {
        let spec = ThermalSpec::new(16.0, 0.5);
        let e = SpectrumModel::Degenerate.energies(16, 3).unwrap();
        let p = state_populations(&spec, &e).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let pop = degenerate_populations(&spec).unwrap();
        assert!((p[3] - pop.ground).abs() < 1e-15);
        assert!((p[0] - pop.excited).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn populations_sum_to_one(log_n in 0.31f64..23.0, dt in 0.0f64..20.0) {
            let spec = ThermalSpec::new(10f64.powf(log_n), dt);
            let pop = degenerate_populations(&spec).unwrap();
            prop_assert!(pop.ground > 0.0 && pop.excited >= 0.0);
            let total = pop.ground + (spec.n_states - 1.0) * pop.excited;
            prop_assert!((total - 1.0).abs() < 1e-12);
            let a = boltzmann_factor(&spec).unwrap();
            prop_assert!(a > 0.0 && a < 1.0);
        }

        #[test]
        fn ground_population_decreases(log_n in 0.31f64..12.0, dt in 0.0f64..9.0, bump in 0.01f64..1.0) {
            let n = 10f64.powf(log_n);
            let base = ground_state_population(&ThermalSpec::new(n, dt)).unwrap();
            let hotter = ground_state_population(&ThermalSpec::new(n, dt + bump)).unwrap();
            let bigger = ground_state_population(&ThermalSpec::new(n * (1.0 + bump), dt)).unwrap();
            prop_assert!(hotter < base);
            prop_assert!(bigger < base);
        }
    }
}
