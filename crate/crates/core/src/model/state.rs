use crate::spectral::{norm_of_components, Grid, NormKind, SpectralError, SpectralField, ZeroModeRule};

/// Number of scalar fields in a state.
pub const FIELD_COUNT: usize = 11;

/// Canonical field names, in the order used by [`PlasmaState::fields`] and
/// by per-mode coefficient vectors: `(n, u1, u2, u3, theta, E1, E2, E3, B1, B2, B3)`.
pub const FIELD_NAMES: [&str; FIELD_COUNT] = [
    "n", "u1", "u2", "u3", "theta", "E1", "E2", "E3", "B1", "B2", "B3",
];

/// Perturbation of the equilibrium `(1, 0, 1, 0, B_inf)`: density `n`,
/// velocity `u`, temperature `theta`, electric field `e` and magnetic
/// perturbation `b`, all stored spectrally.
#[derive(Clone, Debug, PartialEq)]
pub struct PlasmaState {
    pub n: SpectralField,
    pub u: [SpectralField; 3],
    pub theta: SpectralField,
    pub e: [SpectralField; 3],
    pub b: [SpectralField; 3],
    pub time: f64,
}

/// Right-hand side of the evolution equations; same shape as a state.
pub type Tendency = PlasmaState;

/// Physical groups of fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Density,
    Velocity,
    Temperature,
    Electric,
    Magnetic,
}

impl Group {
    pub const ALL: [Group; 5] = [
        Group::Density,
        Group::Velocity,
        Group::Temperature,
        Group::Electric,
        Group::Magnetic,
    ];
}

impl PlasmaState {
    /// The equilibrium (all perturbations zero).
    pub fn equilibrium(grid: &Grid) -> Self {
        let z = || SpectralField::zeros(grid);
        Self {
            n: z(),
            u: [z(), z(), z()],
            theta: z(),
            e: [z(), z(), z()],
            b: [z(), z(), z()],
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.n.grid()
    }

    pub fn fields(&self) -> [&SpectralField; FIELD_COUNT] {
        let [u1, u2, u3] = &self.u;
        let [e1, e2, e3] = &self.e;
        let [b1, b2, b3] = &self.b;
        [&self.n, u1, u2, u3, &self.theta, e1, e2, e3, b1, b2, b3]
    }

    pub fn fields_mut(&mut self) -> [&mut SpectralField; FIELD_COUNT] {
        let [u1, u2, u3] = &mut self.u;
        let [e1, e2, e3] = &mut self.e;
        let [b1, b2, b3] = &mut self.b;
        [&mut self.n, u1, u2, u3, &mut self.theta, e1, e2, e3, b1, b2, b3]
    }

    /// Components of one physical group.
    pub fn group(&self, group: Group) -> Vec<&SpectralField> {
        match group {
            Group::Density => vec![&self.n],
            Group::Velocity => self.u.iter().collect(),
            Group::Temperature => vec![&self.theta],
            Group::Electric => self.e.iter().collect(),
            Group::Magnetic => self.b.iter().collect(),
        }
    }

    /// `self += factor * other` on every field (time untouched).
    pub fn axpy(&mut self, factor: f64, other: &PlasmaState) {
        for (a, b) in self.fields_mut().into_iter().zip(other.fields()) {
            a.axpy(factor, b);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for f in self.fields_mut() {
            f.scale(factor);
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// Squared L2 norm of all eleven fields.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.fields().iter().map(|f| f.l2_norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sqr().sqrt()
    }

    pub fn is_equilibrium(&self) -> bool {
        self.fields()
            .iter()
            .all(|f| f.coefficients().iter().all(|c| c.re == 0.0 && c.im == 0.0))
    }

    /// Largest zero-mode magnitude over all fields.
    pub fn max_mean(&self) -> f64 {
        self.fields().iter().map(|f| f.mean().norm()).fold(0.0, f64::max)
    }

    /// `||A||_X + ||B||_X + ...` over the listed groups, with each vector
    /// group measured by its Euclidean L2-type norm.
    pub fn group_norm_sum(&self, groups: &[Group], kind: NormKind, rule: ZeroModeRule) -> Result<f64, SpectralError> {
        groups
            .iter()
            .map(|g| norm_of_components(&self.group(*g), kind, rule))
            .sum()
    }

    /// `sum_fields ||Lambda^level f||^2` over the listed groups.
    pub fn level_norm_sqr(&self, groups: &[Group], level: f64) -> f64 {
        let grid = self.grid();
        groups
            .iter()
            .flat_map(|g| self.group(*g))
            .map(|f| {
                if level == 0.0 {
                    f.l2_norm_sqr()
                } else {
                    f.weighted_norm_sqr(|i| grid.wavenumber_magnitude(i).powf(2.0 * level))
                }
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::RealField;
    use std::f64::consts::PI;

    #[test]
    fn field_order_matches_names() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.theta = RealField::from_fn(&g, |x| x[0].sin()).to_spectral();
        let fields = s.fields();
        let idx = FIELD_NAMES.iter().position(|n| *n == "theta").unwrap();
        assert!(fields[idx].rms() > 0.0);
        assert_eq!(fields.iter().filter(|f| f.rms() > 0.0).count(), 1);
    }

    #[test]
    fn level_norms_of_unit_mode_are_equal() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.u[1] = RealField::from_fn(&g, |x| x[2].cos()).to_spectral();
        let base = s.level_norm_sqr(&[Group::Velocity], 0.0);
        for l in 1..4 {
            let v = s.level_norm_sqr(&[Group::Velocity], l as f64);
            assert!((v - base).abs() < 1e-12 * base);
        }
    }
}
