use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::constraints::{electric_field_from_density, leray_project};
use super::{Group, ModelError, PlasmaState};
use crate::rng;
use crate::spectral::{curl, dealias, gradient, Grid, NormKind, RealField, SpectralField, ZeroModeRule};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// Independent complex Gaussian coefficients on every mode with
    /// `0 < max_i |m_i| <= max_mode`, each seeded field rescaled to unit RMS.
    BandLimitedRandom { max_mode: u32, seed: u64 },
    /// Periodized Gaussian `exp(-|x - c|^2 / width^2)` centred in the box,
    /// rescaled to unit peak. Scalars use the bump itself, `u` its scaled
    /// gradient, and `E`, `B` the curls of `(bump, 0, 0)` and `(0, 0, bump)`.
    GaussianBump { width: f64 },
}

/// Which field groups receive seeded perturbations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentMask {
    pub n: bool,
    pub u: bool,
    pub theta: bool,
    pub e: bool,
    pub b: bool,
}

impl ComponentMask {
    pub const ALL: ComponentMask = ComponentMask {
        n: true,
        u: true,
        theta: true,
        e: true,
        b: true,
    };
    pub const NONE: ComponentMask = ComponentMask {
        n: false,
        u: false,
        theta: false,
        e: false,
        b: false,
    };

    pub fn is_empty(&self) -> bool {
        !(self.n || self.u || self.theta || self.e || self.b)
    }
}

/// Quantity pinned by [`Normalization`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormalizedQuantity {
    /// `||(u, theta, E, B)||` in `H^-s` (component-wise sum).
    NegSobolev(f64),
    /// `||(u, theta, E, B)||` in `B^-s_{2,inf}` (component-wise sum).
    NegBesov(f64),
    /// The energy `E_N`.
    Energy(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub quantity: NormalizedQuantity,
    pub target: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub amplitude: f64,
    pub profile: Profile,
    pub mask: ComponentMask,
    pub normalization: Option<Normalization>,
}

impl InitialDataSpec {
    pub fn validate(&self, grid: &Grid) -> Result<(), ModelError> {
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(ModelError::InvalidSpec(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        match self.profile {
            Profile::BandLimitedRandom { max_mode, .. } => {
                if max_mode == 0 || max_mode as i64 > grid.dealias_cutoff() {
                    return Err(ModelError::InvalidSpec(format!(
                        "max_mode must be in 1..={}, got {max_mode}",
                        grid.dealias_cutoff()
                    )));
                }
            }
            Profile::GaussianBump { width } => {
                if !(width.is_finite() && width > 0.0 && width < grid.box_length()) {
                    return Err(ModelError::InvalidSpec(format!(
                        "bump width must be in (0, L), got {width}"
                    )));
                }
            }
        }
        if let Some(norm) = self.normalization {
            if !(norm.target.is_finite() && norm.target > 0.0) {
                return Err(ModelError::InvalidSpec(format!(
                    "normalization target must be positive, got {}",
                    norm.target
                )));
            }
            match norm.quantity {
                NormalizedQuantity::NegSobolev(s) | NormalizedQuantity::NegBesov(s) if !(s > 0.0) => {
                    return Err(ModelError::InvalidSpec(format!(
                        "normalization order must be positive, got {s}"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Builds compatible initial data: `div E = -n`, `div B = 0`, every field
/// mean-zero and two-thirds band-limited. `E` is the gradient field
/// `-grad Delta^{-1} n` plus, when seeded, a divergence-free part.
pub fn make_initial_data(spec: &InitialDataSpec, grid: &Grid) -> Result<PlasmaState, ModelError> {
    spec.validate(grid)?;
    let mut state = PlasmaState::equilibrium(grid);
    if spec.mask.is_empty() {
        if spec.normalization.is_some() {
            return Err(ModelError::DegenerateNormalization);
        }
        return Ok(state);
    }
    let mut seeds = Seeder::new(spec.profile, grid);
    let mask = spec.mask;
    if mask.n {
        state.n = seeds.scalar(0);
    }
    if mask.u {
        state.u = seeds.vector(1, VectorKind::Gradient);
    }
    if mask.theta {
        state.theta = seeds.scalar(4);
    }
    if mask.e {
        state.e = seeds.vector(5, VectorKind::Solenoidal(Axis::X));
    }
    if mask.b {
        state.b = seeds.vector(8, VectorKind::Solenoidal(Axis::Z));
    }
    let gradient_part = electric_field_from_density(&state.n);
    for (e, g) in state.e.iter_mut().zip(&gradient_part) {
        e.axpy(1.0, g);
    }
    state.scale(spec.amplitude);

    if let Some(norm) = spec.normalization {
        let measured = measure(&state, norm.quantity)?;
        if !(measured > 0.0) {
            return Err(ModelError::DegenerateNormalization);
        }
        let factor = match norm.quantity {
            NormalizedQuantity::Energy(_) => (norm.target / measured).sqrt(),
            _ => norm.target / measured,
        };
        state.scale(factor);
    }
    Ok(state)
}

/// Value of a normalization quantity for a state.
pub fn measure(state: &PlasmaState, quantity: NormalizedQuantity) -> Result<f64, ModelError> {
    const DECAY_GROUPS: [Group; 4] = [Group::Velocity, Group::Temperature, Group::Electric, Group::Magnetic];
    Ok(match quantity {
        NormalizedQuantity::NegSobolev(s) => {
            state.group_norm_sum(&DECAY_GROUPS, NormKind::NegSobolev(s), ZeroModeRule::RequireZero)?
        }
        NormalizedQuantity::NegBesov(s) => {
            state.group_norm_sum(&DECAY_GROUPS, NormKind::NegBesov(s), ZeroModeRule::RequireZero)?
        }
        NormalizedQuantity::Energy(order) => (0..=order)
            .map(|l| state.level_norm_sqr(&Group::ALL, l as f64))
            .sum(),
    })
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Z,
}

#[derive(Clone, Copy)]
enum VectorKind {
    Gradient,
    Solenoidal(Axis),
}

struct Seeder {
    profile: Profile,
    grid: Grid,
    bump: Option<SpectralField>,
}

impl Seeder {
    fn new(profile: Profile, grid: &Grid) -> Self {
        let bump = match profile {
            Profile::GaussianBump { width } => Some(gaussian_bump(grid, width)),
            Profile::BandLimitedRandom { .. } => None,
        };
        Self {
            profile,
            grid: grid.clone(),
            bump,
        }
    }

    /// Field number `slot` of the canonical ordering.
    fn scalar(&mut self, slot: u64) -> SpectralField {
        match self.profile {
            Profile::BandLimitedRandom { max_mode, seed } => {
                let mut f = random_band_limited(&self.grid, max_mode, seed, slot);
                normalize_rms(&mut f);
                f
            }
            Profile::GaussianBump { .. } => {
                let mut f = self.bump.clone().expect("bump profile");
                normalize_peak(&mut f);
                f
            }
        }
    }

    fn vector(&mut self, first_slot: u64, kind: VectorKind) -> [SpectralField; 3] {
        let mut v = match self.profile {
            Profile::BandLimitedRandom { max_mode, seed } => {
                let v = [0, 1, 2].map(|a| random_band_limited(&self.grid, max_mode, seed, first_slot + a));
                match kind {
                    VectorKind::Gradient => v,
                    VectorKind::Solenoidal(_) => leray_project(&v),
                }
            }
            Profile::GaussianBump { .. } => {
                let bump = self.bump.clone().expect("bump profile");
                let zero = SpectralField::zeros(&self.grid);
                match kind {
                    VectorKind::Gradient => gradient(&bump),
                    VectorKind::Solenoidal(Axis::X) => curl(&[bump, zero.clone(), zero]),
                    VectorKind::Solenoidal(Axis::Z) => curl(&[zero.clone(), zero, bump]),
                }
            }
        };
        match self.profile {
            Profile::BandLimitedRandom { .. } => {
                let rms = (v.iter().map(|f| f.rms().powi(2)).sum::<f64>() / 3.0).sqrt();
                if rms > 0.0 {
                    v.iter_mut().for_each(|f| f.scale(1.0 / rms));
                }
            }
            Profile::GaussianBump { .. } => {
                let real: Vec<RealField> = v.iter().map(|f| f.to_real()).collect();
                let peak = crate::spectral::magnitude(&real).max_abs();
                if peak > 0.0 {
                    v.iter_mut().for_each(|f| f.scale(1.0 / peak));
                }
            }
        }
        v
    }
}

fn normalize_rms(f: &mut SpectralField) {
    let rms = f.rms();
    if rms > 0.0 {
        f.scale(1.0 / rms);
    }
}

fn normalize_peak(f: &mut SpectralField) {
    let peak = f.to_real().max_abs();
    if peak > 0.0 {
        f.scale(1.0 / peak);
    }
}

fn random_band_limited(grid: &Grid, max_mode: u32, seed: u64, slot: u64) -> SpectralField {
    let mut rng = rng::substream(seed, rng::INITIAL_DATA, slot);
    let cap = max_mode as i64;
    let mut f = SpectralField::zeros(grid);
    for i in 0..grid.len() {
        let m = grid.mode(i);
        let inside = m.iter().all(|c| c.abs() <= cap) && m != [0, 0, 0];
        // draw for every mode so the stream does not depend on max_mode layout
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        if inside {
            f.coefficients_mut()[i] = Complex64::new(re, im);
        }
    }
    f.symmetrize();
    f
}

fn gaussian_bump(grid: &Grid, width: f64) -> SpectralField {
    let l = grid.box_length();
    let c = 0.5 * l;
    let periodic = move |d: f64| {
        let d = (d - c).rem_euclid(l);
        d.min(l - d)
    };
    let real = RealField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|&xi| periodic(xi).powi(2)).sum();
        (-r2 / (width * width)).exp()
    });
    let mut f = real.to_spectral();
    f.remove_mean();
    dealias(&mut f);
    f.symmetrize();
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::constraint_residual;
    use std::f64::consts::PI;

    fn spec(amplitude: f64) -> InitialDataSpec {
        InitialDataSpec {
            amplitude,
            profile: Profile::BandLimitedRandom { max_mode: 3, seed: 42 },
            mask: ComponentMask::ALL,
            normalization: None,
        }
    }

    #[test]
    fn empty_mask_gives_equilibrium() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let mut s = spec(1e-3);
        s.mask = ComponentMask::NONE;
        assert!(make_initial_data(&s, &g).unwrap().is_equilibrium());
        s.normalization = Some(Normalization {
            quantity: NormalizedQuantity::NegSobolev(0.5),
            target: 0.01,
        });
        assert!(matches!(make_initial_data(&s, &g), Err(ModelError::DegenerateNormalization)));
    }

    #[test]
    fn random_data_is_compatible_and_linear_in_amplitude() {
        let g = Grid::new(16, 8.0 * PI).unwrap();
        let a = make_initial_data(&spec(1e-3), &g).unwrap();
        let b = make_initial_data(&spec(2e-3), &g).unwrap();
        let (re, rb) = constraint_residual(&a);
        assert!(re < 1e-12 && rb < 1e-12, "{re} {rb}");
        for (fa, fb) in a.fields().iter().zip(b.fields()) {
            assert!(fa.is_mean_zero() && fa.hermitian_defect() < 1e-12);
            assert!(fb.sub(&fa.scaled(2.0)).rms() <= 1e-15 * fb.rms().max(1e-300));
        }
    }

    #[test]
    fn normalization_hits_target() {
        let g = Grid::new(16, 8.0 * PI).unwrap();
        let mut s = spec(1e-3);
        s.normalization = Some(Normalization {
            quantity: NormalizedQuantity::NegSobolev(0.5),
            target: 0.01,
        });
        let state = make_initial_data(&s, &g).unwrap();
        let v = measure(&state, NormalizedQuantity::NegSobolev(0.5)).unwrap();
        assert!((v - 0.01).abs() < 1e-10 * 0.01);
    }

    #[test]
    fn gaussian_bump_is_compatible() {
        let g = Grid::new(16, 4.0 * PI).unwrap();
        let s = InitialDataSpec {
            amplitude: 1e-2,
            profile: Profile::GaussianBump { width: 2.0 },
            mask: ComponentMask::ALL,
            normalization: None,
        };
        let state = make_initial_data(&s, &g).unwrap();
        let (re, rb) = constraint_residual(&state);
        assert!(re < 1e-12 && rb < 1e-12);
        assert!(state.fields().iter().all(|f| f.is_mean_zero()));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let mut s = spec(-1.0);
        assert!(make_initial_data(&s, &g).is_err());
        s.amplitude = 1.0;
        s.profile = Profile::BandLimitedRandom { max_mode: 9, seed: 1 };
        assert!(make_initial_data(&s, &g).is_err());
    }
}
