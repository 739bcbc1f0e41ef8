//! One-dimensional Maxwell-Bloch propagation of the probe envelope along
//! its wave vector,
//!
//! ```text
//! c ∂Ω/∂z + ∂Ω/∂t = i ω_p κ ρ_ab
//! ```
//!
//! through a column of stationary atoms. Each step is Strang-split: half a
//! step of the local source (field plus atoms, RK4), exact transport along
//! the characteristics, then the second half of the source.

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::bloch::{bloch_rhs, DensityMatrix3};
use crate::error::{EitError, Result};
use crate::numerics::ode::rk4_step;
use crate::params::{derive_rates_with_coupling, AtomParams};
use crate::scalar::{cplx, Real};

/// Smallest permitted grid.
pub const MIN_CELLS: usize = 16;

/// Uniform grid of `n_cells + 1` nodes on `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    pub n_cells: usize,
    pub dz: T,
    pub dt: T,
}

impl<T: Real> Grid1D<T> {
    /// Grid with spacing `length / n_cells` and time step `courant · dz / c`.
    pub fn new(length: T, n_cells: usize, courant: T, c: T) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(EitError::InvalidParameter {
                name: "length",
                reason: format!("domain length must be positive, got {}", length),
            });
        }
        let dz = length / T::from_count(n_cells.max(1));
        let grid = Self {
            n_cells,
            dz,
            dt: courant * dz / c,
        };
        grid.validate(c)?;
        Ok(grid)
    }

    pub fn courant(&self, c: T) -> T {
        c * self.dt / self.dz
    }

    pub fn validate(&self, c: T) -> Result<()> {
        if self.n_cells < MIN_CELLS {
            return Err(EitError::GridTooSmall {
                n_cells: self.n_cells,
                min: MIN_CELLS,
            });
        }
        let courant = self.courant(c);
        if !(courant > T::zero()) || courant > T::one() + T::lit(8.0) * T::epsilon() {
            return Err(EitError::Cfl {
                courant: courant.as_f64(),
            });
        }
        Ok(())
    }

    pub fn length(&self) -> T {
        self.dz * T::from_count(self.n_cells)
    }

    pub fn positions(&self) -> Vec<T> {
        (0..=self.n_cells).map(|i| self.dz * T::from_count(i)).collect()
    }
}

/// How the atoms respond to the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingModel {
    /// Full three-level Bloch equations at every node.
    FullBloch,
    /// The adiabatic first-order equation for ρ_ab.
    AdiabaticRhoAb,
}

/// Run controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationSettings<T> {
    pub grid: Grid1D<T>,
    pub t_end: T,
    pub coupling: CouplingModel,
    /// Field snapshots are stored every this many steps (and at the end).
    pub snapshot_every: usize,
    /// RK4 substeps per half source step of the full Bloch model; the
    /// adiabatic model is advanced exactly.
    pub source_substeps: usize,
}

/// Output of [`propagate`].
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationRecord<T> {
    pub coupling: CouplingModel,
    pub z: Vec<T>,
    pub snapshot_times: Vec<T>,
    /// `|Ω(z)|` at each snapshot time.
    pub snapshots: Vec<Vec<T>>,
    /// `ρ_ab(z)` at each snapshot time.
    pub rho_ab: Vec<Vec<Complex<T>>>,
    /// Time, interpolated peak position and peak amplitude after every step.
    pub peak_times: Vec<T>,
    pub peak_positions: Vec<T>,
    pub peak_amplitudes: Vec<T>,
    /// `∫|Ω(0, t)|² dt` and `∫|Ω(L, t)|² dt` over the run.
    pub energy_in: T,
    pub energy_out: T,
    pub max_rho_ab: T,
    /// Only meaningful for [`CouplingModel::FullBloch`]; zero otherwise.
    pub max_rho_ac: T,
    pub steps: usize,
    /// Set when the sampled inflow has spectral content beyond 1% of the
    /// carrier frequency.
    pub svea_warning: Option<String>,
}

#[derive(Clone, Copy)]
enum Medium<T> {
    Bloch(DensityMatrix3<T>),
    // u = ρ_ab − (i/2γ_ab) Ω
    Adiabatic(Complex<T>),
}

struct Source<T> {
    atom: AtomParams<T>,
    omega_c: Complex<T>,
    gain: T,
    /// Exact propagator of the linear adiabatic source over half a step.
    adiabatic_half_step: [[Complex<T>; 2]; 2],
}

impl<T: Real> Source<T> {
    fn adiabatic_offset(&self) -> Complex<T> {
        cplx(T::zero(), T::lit(0.5) / self.atom.gamma_ab)
    }

    fn rho_ab(&self, field: Complex<T>, medium: &Medium<T>) -> Complex<T> {
        match medium {
            Medium::Bloch(rho) => rho.ab,
            Medium::Adiabatic(u) => *u + self.adiabatic_offset() * field,
        }
    }

    /// Advances one node's field and atoms through `h` of pure source.
    fn advance(&self, field: &mut Complex<T>, medium: &mut Medium<T>, h: T, substeps: usize) {
        let dh = h / T::from_count(substeps);
        let g = self.gain;
        match medium {
            Medium::Bloch(rho) => {
                let mut y = [T::zero(); 11];
                y[..9].copy_from_slice(&rho.to_array());
                y[9] = field.re;
                y[10] = field.im;
                let f = |_t: T, y: &[T; 11]| {
                    let mut s = [T::zero(); 9];
                    s.copy_from_slice(&y[..9]);
                    let r = DensityMatrix3::from_array(&s);
                    let om = Complex::new(y[9], y[10]);
                    let d = bloch_rhs(&r, &self.atom, om, self.omega_c);
                    let mut out = [T::zero(); 11];
                    out[..9].copy_from_slice(&d.to_array());
                    // dΩ/dt = i g ρ_ab
                    out[9] = -g * r.ab.im;
                    out[10] = g * r.ab.re;
                    out
                };
                for _ in 0..substeps {
                    y = rk4_step(f, T::zero(), &y, dh);
                }
                let mut s = [T::zero(); 9];
                s.copy_from_slice(&y[..9]);
                *rho = DensityMatrix3::from_array(&s);
                *field = Complex::new(y[9], y[10]);
            }
            Medium::Adiabatic(u) => {
                let m = &self.adiabatic_half_step;
                let (u0, f0) = (*u, *field);
                *u = m[0][0] * u0 + m[0][1] * f0;
                *field = m[1][0] * u0 + m[1][1] * f0;
            }
        }
    }
}

/// Propagator of `du/dt = −λu + (i/2γ_ab)(γ_bc − λ)Ω`,
/// `dΩ/dt = i g u − g Ω/(2γ_ab)` with `g = ω_p κ`.
fn adiabatic_source_matrix<T: Real>(atom: &AtomParams<T>, lambda: T, h: T) -> [[Complex<T>; 2]; 2] {
    let g = atom.omega_p * atom.kappa;
    let half_inv = T::lit(0.5) / atom.gamma_ab;
    let a = [
        [Complex::new(-lambda, T::zero()), cplx(T::zero(), half_inv * (atom.gamma_bc - lambda))],
        [cplx(T::zero(), g), Complex::new(-g * half_inv, T::zero())],
    ];
    expm2(a, h)
}

/// `exp(a h)` for a 2×2 complex matrix,
/// `e^{mh} (cosh(qh) I + sinh(qh)/q (a − m I))` with `m` the mean eigenvalue.
fn expm2<T: Real>(a: [[Complex<T>; 2]; 2], h: T) -> [[Complex<T>; 2]; 2] {
    let half = T::lit(0.5);
    let m = (a[0][0] + a[1][1]) * half;
    let d = (a[0][0] - a[1][1]) * half;
    let q = (d * d + a[0][1] * a[1][0]).sqrt();
    let qh = q * h;
    let ch = qh.cosh();
    let sh = if qh.norm() < T::lit(1e-4) {
        // sinh(qh)/q
        Complex::new(h, T::zero()) * (Complex::new(T::one(), T::zero()) + qh * qh / T::lit(6.0))
    } else {
        qh.sinh() / q
    };
    let e = (m * h).exp();
    [
        [e * (ch + sh * d), e * sh * a[0][1]],
        [e * sh * a[1][0], e * (ch - sh * d)],
    ]
}

/// Propagates an inflow pulse through the medium, atoms starting in |b⟩ and
/// the interior field at zero.
pub fn propagate<T, F>(
    settings: &PropagationSettings<T>,
    atom: &AtomParams<T>,
    omega_c: Complex<T>,
    inflow: F,
) -> Result<PropagationRecord<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T> + Sync,
{
    atom.validate()?;
    let grid = settings.grid;
    grid.validate(atom.c)?;
    if !(settings.t_end > T::zero()) {
        return Err(EitError::InvalidParameter {
            name: "t_end",
            reason: format!("must be positive, got {}", settings.t_end),
        });
    }
    if settings.source_substeps == 0 || settings.snapshot_every == 0 {
        return Err(EitError::InvalidParameter {
            name: "source_substeps",
            reason: "substep and snapshot counts must be at least 1".into(),
        });
    }
    let rates = derive_rates_with_coupling(atom, omega_c)?;
    let source = Source {
        atom: *atom,
        omega_c,
        gain: atom.omega_p * atom.kappa,
        adiabatic_half_step: adiabatic_source_matrix(atom, rates.lambda, grid.dt * T::lit(0.5)),
    };

    let nodes = grid.n_cells + 1;
    let dt = grid.dt;
    let n_steps = (settings.t_end / dt).ceil().to_usize().unwrap_or(0).max(1);
    let z = grid.positions();
    let courant = grid.courant(atom.c);
    let exact_shift = courant == T::one();

    let svea_warning = svea_check(&inflow, dt, n_steps, atom.omega_p);

    let mut field = vec![Complex::new(T::zero(), T::zero()); nodes];
    field[0] = inflow(T::zero());
    let initial = match settings.coupling {
        CouplingModel::FullBloch => Medium::Bloch(DensityMatrix3::dark_state()),
        CouplingModel::AdiabaticRhoAb => Medium::Adiabatic(Complex::new(T::zero(), T::zero())),
    };
    let mut medium = vec![initial; nodes];
    // with u = 0 the adiabatic ρ_ab follows the field already present at z = 0
    let mut record = PropagationRecord {
        coupling: settings.coupling,
        z: z.clone(),
        snapshot_times: Vec::new(),
        snapshots: Vec::new(),
        rho_ab: Vec::new(),
        peak_times: Vec::with_capacity(n_steps),
        peak_positions: Vec::with_capacity(n_steps),
        peak_amplitudes: Vec::with_capacity(n_steps),
        energy_in: T::zero(),
        energy_out: T::zero(),
        max_rho_ab: T::zero(),
        max_rho_ac: T::zero(),
        steps: n_steps,
        svea_warning,
    };
    snapshot(&mut record, &source, T::zero(), &field, &medium);

    let half = dt * T::lit(0.5);
    let substeps = settings.source_substeps;
    let mut scratch = field.clone();
    for step in 1..=n_steps {
        let t_new = dt * T::from_count(step);
        let (in_old, out_old) = (field[0].norm_sqr(), field[nodes - 1].norm_sqr());

        field
            .par_iter_mut()
            .zip(medium.par_iter_mut())
            .for_each(|(f, m)| source.advance(f, m, half, substeps));

        if exact_shift {
            scratch[1..].copy_from_slice(&field[..nodes - 1]);
        } else {
            transport(&field, &mut scratch, courant, |s| inflow(t_new - s * dt));
        }
        scratch[0] = inflow(t_new);
        std::mem::swap(&mut field, &mut scratch);

        field
            .par_iter_mut()
            .zip(medium.par_iter_mut())
            .for_each(|(f, m)| source.advance(f, m, half, substeps));
        // the boundary value is prescribed, not evolved
        field[0] = inflow(t_new);

        if field.iter().any(|f| !(f.re.is_finite() && f.im.is_finite())) {
            return Err(EitError::NumericalBlowup { step });
        }
        let (in_new, out_new) = (field[0].norm_sqr(), field[nodes - 1].norm_sqr());
        record.energy_in += (in_old + in_new) * half;
        record.energy_out += (out_old + out_new) * half;

        for (f, m) in field.iter().zip(&medium) {
            record.max_rho_ab = record.max_rho_ab.max(source.rho_ab(*f, m).norm());
            if let Medium::Bloch(rho) = m {
                if !rho.is_finite() {
                    return Err(EitError::NumericalBlowup { step });
                }
                record.max_rho_ac = record.max_rho_ac.max(rho.ac.norm());
            }
        }

        let (zp, amp) = peak_position(&field, grid.dz);
        record.peak_times.push(t_new);
        record.peak_positions.push(zp);
        record.peak_amplitudes.push(amp);

        if step % settings.snapshot_every == 0 || step == n_steps {
            snapshot(&mut record, &source, t_new, &field, &medium);
        }
    }
    Ok(record)
}

fn snapshot<T: Real>(
    record: &mut PropagationRecord<T>,
    source: &Source<T>,
    t: T,
    field: &[Complex<T>],
    medium: &[Medium<T>],
) {
    record.snapshot_times.push(t);
    record.snapshots.push(field.iter().map(|f| f.norm()).collect());
    record
        .rho_ab
        .push(field.iter().zip(medium).map(|(f, m)| source.rho_ab(*f, m)).collect());
}

/// Semi-Lagrangian transport by `courant < 1` cells with cubic Lagrange
/// interpolation. Nodes left of the boundary are filled from the inflow:
/// `boundary(s)` is the inflow at `s` steps before the new time level.
fn transport<T: Real, B: Fn(T) -> Complex<T>>(
    field: &[Complex<T>],
    out: &mut [Complex<T>],
    courant: T,
    boundary: B,
) {
    let n = field.len();
    let at = |j: isize| -> Complex<T> {
        if j < 0 {
            // upstream of z = 0 the old field is the inflow (−j)/courant steps later
            boundary(T::one() - T::from_count((-j) as usize) / courant)
        } else {
            field[(j as usize).min(n - 1)]
        }
    };
    let s = courant;
    let one = T::one();
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    // departure point x_i − s lies in [i−1, i]; stencil i−2 .. i+1 in the
    // local coordinate θ = 1 − s measured from node i−1
    let th = one - s;
    let w_m1 = -th * (th - one) * (th - two) / six;
    let w_0 = (th + one) * (th - one) * (th - two) / two;
    let w_1 = -(th + one) * th * (th - two) / two;
    let w_2 = (th + one) * th * (th - one) / six;
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let i = i as isize;
        *o = at(i - 2) * w_m1 + at(i - 1) * w_0 + at(i) * w_1 + at(i + 1) * w_2;
    }
}

/// Peak of `|Ω|²` refined by a parabola through the maximum and its
/// neighbours.
fn peak_position<T: Real>(field: &[Complex<T>], dz: T) -> (T, T) {
    let mut best = 0;
    let mut best_val = T::neg_infinity();
    for (i, f) in field.iter().enumerate() {
        let v = f.norm_sqr();
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let mut offset = T::zero();
    if best > 0 && best + 1 < field.len() {
        let (a, b, c) = (
            field[best - 1].norm_sqr(),
            best_val,
            field[best + 1].norm_sqr(),
        );
        let curv = a - b * T::lit(2.0) + c;
        if curv < T::zero() {
            offset = T::lit(0.5) * (a - c) / curv;
        }
    }
    (dz * (T::from_count(best) + offset), best_val.sqrt())
}

/// Spectral extent of the sampled inflow. Returns a message when 99.99% of
/// the spectral energy is not contained below 1% of the carrier.
fn svea_check<T: Real, F: Fn(T) -> Complex<T>>(inflow: &F, dt: T, n_steps: usize, omega_p: T) -> Option<String> {
    let n = (n_steps + 1).min(1 << 16);
    let stride = (n_steps + 1).div_ceil(n);
    let dts = dt.as_f64() * stride as f64;
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let v = inflow(dt * T::from_count(k * stride));
            Complex::new(v.re.as_f64(), v.im.as_f64())
        })
        .collect();
    let total_time: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
    if total_time == 0.0 {
        return None;
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // bins ordered by |ω|
    let mut bins: Vec<(f64, f64)> = buf
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            ((2.0 * std::f64::consts::PI * kk / (n as f64 * dts)).abs(), v.norm_sqr())
        })
        .collect();
    bins.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = bins.iter().map(|b| b.1).sum();
    let mut acc = 0.0;
    let mut bandwidth = 0.0;
    for (w, p) in bins {
        acc += p;
        bandwidth = w;
        if acc >= 0.9999 * total {
            break;
        }
    }
    let limit = 0.01 * omega_p.as_f64();
    (bandwidth > limit).then(|| {
        format!(
            "inflow bandwidth {:.3e} rad/s exceeds 1% of the carrier ({:.3e}); the slowly varying envelope approximation is doubtful",
            bandwidth, limit
        )
    })
}

/// Least-squares velocity of the peak trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityFit<T> {
    pub velocity: T,
    pub stderr: T,
    pub samples: usize,
}

/// Fits `z_peak = z₀ + v t` to the peak samples with `z_lo < z_peak < z_hi`.
pub fn measure_group_velocity<T: Real>(record: &PropagationRecord<T>, window: (T, T)) -> Result<VelocityFit<T>> {
    let (lo, hi) = window;
    let pts: Vec<(T, T)> = record
        .peak_times
        .iter()
        .zip(&record.peak_positions)
        .filter(|(_, &z)| z > lo && z < hi)
        .map(|(&t, &z)| (t, z))
        .collect();
    fit_line(&pts)
}

/// Least-squares slope and its standard error for at least ten points.
pub fn fit_line<T: Real>(pts: &[(T, T)]) -> Result<VelocityFit<T>> {
    const MIN_SAMPLES: usize = 10;
    if pts.len() < MIN_SAMPLES {
        return Err(EitError::InsufficientData {
            found: pts.len(),
            required: MIN_SAMPLES,
        });
    }
    let n = T::from_count(pts.len());
    let tm = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let zm = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - tm) * (p.0 - tm));
    let sxz = pts.iter().fold(T::zero(), |a, p| a + (p.0 - tm) * (p.1 - zm));
    let slope = sxz / sxx;
    let ssr = pts.iter().fold(T::zero(), |a, p| {
        let r = p.1 - zm - slope * (p.0 - tm);
        a + r * r
    });
    let stderr = (ssr / (n - T::lit(2.0)) / sxx).sqrt();
    Ok(VelocityFit {
        velocity: slope,
        stderr,
        samples: pts.len(),
    })
}

/// How well the run supports dropping the coupling-field equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingFieldReport<T> {
    pub max_rho_ac: T,
    pub max_rho_ab: T,
    /// `max|ρ_ac| / max|ρ_ab|`, zero when the probe never excited the atoms.
    pub ratio: T,
    /// False for adiabatic runs, which carry no ρ_ac.
    pub applicable: bool,
}

pub fn coupling_field_checker<T: Real>(record: &PropagationRecord<T>) -> CouplingFieldReport<T> {
    let ratio = if record.max_rho_ab > T::zero() {
        record.max_rho_ac / record.max_rho_ab
    } else {
        T::zero()
    };
    CouplingFieldReport {
        max_rho_ac: record.max_rho_ac,
        max_rho_ab: record.max_rho_ab,
        ratio,
        applicable: record.coupling == CouplingModel::FullBloch,
    }
}
