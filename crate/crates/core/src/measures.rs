//! Scalar functionals of two-qubit states.
//!
//! Entropies are computed in nats and converted to the requested
//! [`LogBase`] on output. Spectra feeding an entropy are cleaned first:
//! eigenvalues in `[-1e-10, 0)` are clipped to zero and the vector is
//! renormalized; anything more negative is an error.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::density::DensityMatrix4;
use crate::error::{Error, Result};
use crate::families::Spectrum4;
use crate::linalg::{hermitian_eigensystem, hermitian_eigenvalues, EigenSystem, Matrix, Matrix4, Subsystem, C64};
use crate::math::{exp_m1, ln, ln_1p, powf, sqrt};

/// Tolerated negative round-off in a spectrum.
pub const CLIP_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are round-off and are set to zero. Matters
/// for `q < 1`, where `p^q` would inflate them.
pub const ZERO_FLOOR: f64 = 1e-14;
/// `C` above this counts as entangled in boolean flags.
pub const ENTANGLED_TOL: f64 = 1e-12;
/// Conditional entropies at or above `-INEQUALITY_TOL` satisfy the
/// classical inequalities.
pub const INEQUALITY_TOL: f64 = 1e-12;
/// Partial-transpose eigenvalues at or above `-PPT_TOL` count as positive.
pub const PPT_TOL: f64 = 1e-10;

/// Entropic index `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    /// Any `q > 0`, `q != 1`.
    Finite(f64),
    /// The von Neumann limit `q -> 1`.
    One,
    /// The min-entropy limit `q -> infinity`.
    Infinity,
}

impl Order {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_nan() || q <= 0.0 {
            Err(Error::InvalidOrder(q))
        } else if q == 1.0 {
            Ok(Order::One)
        } else if q.is_infinite() {
            Ok(Order::Infinity)
        } else {
            Ok(Order::Finite(q))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Order::Finite(q) => q,
            Order::One => 1.0,
            Order::Infinity => f64::INFINITY,
        }
    }

    fn checked(self) -> Result<Self> {
        match self {
            Order::Finite(q) => Order::new(q),
            o => Ok(o),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "INF" | "Inf" | "∞" => Ok(Order::Infinity),
            t => t.parse::<f64>().map_err(|_| Error::InvalidOrder(f64::NAN)).and_then(Order::new),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Infinity => f.write_str("inf"),
            o => write!(f, "{}", o.value()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / core::f64::consts::LN_2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyParams {
    pub order: Order,
    pub base: LogBase,
}

impl EntropyParams {
    pub fn new(order: Order, base: LogBase) -> Self {
        EntropyParams { order, base }
    }
}

fn clean<const N: usize>(p: [f64; N]) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    let mut total = 0.0;
    for (o, &x) in out.iter_mut().zip(p.iter()) {
        if !x.is_finite() {
            return Err(Error::InvalidSpectrum("non-finite probability"));
        }
        if x < -CLIP_TOL {
            return Err(Error::NegativeEigenvalue(x));
        }
        *o = if x <= ZERO_FLOOR { 0.0 } else { x };
        total += *o;
    }
    if total <= 0.0 {
        return Err(Error::InvalidSpectrum("probabilities sum to zero"));
    }
    for o in out.iter_mut() {
        *o /= total;
    }
    Ok(out)
}

fn check_probabilities(p: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = p.iter().sum();
    if !total.is_finite() || (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSpectrum("probabilities must sum to 1"));
    }
    let mut out = Vec::with_capacity(p.len());
    for &x in p {
        if x < -CLIP_TOL {
            return Err(Error::NegativeEigenvalue(x));
        }
        out.push(x.max(0.0) / total);
    }
    Ok(out)
}

fn von_neumann_nats(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * ln(x)).sum::<f64>()
}

// ln(sum p^q), factored through max p so large q does not underflow.
fn ln_power_sum(p: &[f64], q: f64) -> f64 {
    let pmax = p.iter().copied().fold(0.0, f64::max);
    let s: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| powf(x / pmax, q)).sum();
    q * ln(pmax) + ln(s)
}

/// Below this `|q - 1|` the entropies use `expm1`/`ln1p` sums.
const NEAR_ONE: f64 = 0.5;

// sum p (p^(q-1) - 1), free of cancellation for q near 1.
fn power_sum_excess(p: &[f64], q: f64) -> f64 {
    let d = q - 1.0;
    p.iter().filter(|&&x| x > 0.0).map(|&x| x * exp_m1(d * ln(x))).sum()
}

fn renyi_nats(p: &[f64], order: Order) -> f64 {
    match order {
        Order::One => von_neumann_nats(p),
        Order::Infinity => -ln(p.iter().copied().fold(0.0, f64::max)),
        Order::Finite(q) if (q - 1.0).abs() <= NEAR_ONE => {
            let total: f64 = p.iter().sum();
            ln(total) - ln_1p(power_sum_excess(p, q) / total) / (q - 1.0)
        }
        Order::Finite(q) => ln_power_sum(p, q) / (1.0 - q),
    }
}

fn tsallis_value(p: &[f64], q: f64) -> f64 {
    if q == 1.0 {
        return von_neumann_nats(p);
    }
    if (q - 1.0).abs() <= NEAR_ONE {
        return -power_sum_excess(p, q) / (q - 1.0);
    }
    let omega: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| powf(x, q)).sum();
    (1.0 - omega) / (q - 1.0)
}

fn tsallis_order(q: f64) -> Result<f64> {
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::InvalidOrder(q));
    }
    Ok(q)
}

/// Rényi entropy `ln(sum p^q) / (1 - q)` of a probability vector, with the
/// von Neumann and min-entropy limits at [`Order::One`] and
/// [`Order::Infinity`].
pub fn renyi_entropy(p: &[f64], params: EntropyParams) -> Result<f64> {
    let order = params.order.checked()?;
    let p = check_probabilities(p)?;
    Ok(params.base.from_nats(renyi_nats(&p, order)))
}

/// Tsallis entropy `(1 - sum p^q) / (q - 1)`; `q = 1` gives von Neumann in nats.
pub fn tsallis_entropy(p: &[f64], q: f64) -> Result<f64> {
    let q = tsallis_order(q)?;
    let p = check_probabilities(p)?;
    Ok(tsallis_value(&p, q))
}

/// `(e^{(1-q)x} - 1) / (1 - q)`: maps a Rényi entropy in nats to the
/// Tsallis entropy of the same spectrum.
pub fn renyi_to_tsallis(renyi_nats: f64, q: f64) -> f64 {
    if q == 1.0 {
        return renyi_nats;
    }
    exp_m1((1.0 - q) * renyi_nats) / (1.0 - q)
}

/// Cleaned spectra of `rho_AB`, `rho_A` and `rho_B`, all descending.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateSpectra {
    pub ab: [f64; 4],
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl StateSpectra {
    pub fn of(rho: &DensityMatrix4) -> Result<Self> {
        let ab = hermitian_eigenvalues(rho.matrix())?;
        Self::from_eigenvalues(rho, ab)
    }

    /// Reuses an already computed joint spectrum.
    pub fn from_eigenvalues(rho: &DensityMatrix4, ab: [f64; 4]) -> Result<Self> {
        let a = hermitian_eigenvalues(rho.reduced(Subsystem::A).matrix())?;
        let b = hermitian_eigenvalues(rho.reduced(Subsystem::B).matrix())?;
        Ok(StateSpectra { ab: clean(ab)?, a: clean(a)?, b: clean(b)? })
    }

    pub fn reduced(&self, which: Subsystem) -> [f64; 2] {
        match which {
            Subsystem::A => self.a,
            Subsystem::B => self.b,
        }
    }

    /// `S_q(AB) - S_q(C)` in nats, where `C` is the conditioning subsystem.
    pub fn conditional_renyi_nats(&self, order: Order, conditioned_on: Subsystem) -> f64 {
        renyi_nats(&self.ab, order) - renyi_nats(&self.reduced(conditioned_on), order)
    }

    pub fn conditional_tsallis(&self, q: f64, conditioned_on: Subsystem) -> f64 {
        let joint = tsallis_value(&self.ab, q);
        let marginal = tsallis_value(&self.reduced(conditioned_on), q);
        (joint - marginal) / (1.0 + (1.0 - q) * marginal)
    }

    /// Both conditional Rényi entropies are nonnegative for every order.
    pub fn classical_inequalities_hold(&self, qset: &[Order]) -> bool {
        qset.iter().all(|&o| {
            self.conditional_renyi_nats(o, Subsystem::B) >= -INEQUALITY_TOL
                && self.conditional_renyi_nats(o, Subsystem::A) >= -INEQUALITY_TOL
        })
    }
}

/// Conditional Tsallis entropy. `conditioned_on = B` gives `S_q(A|B)`,
/// normalized by `1 + (1 - q) S_q(B)`.
pub fn conditional_tsallis(rho: &DensityMatrix4, q: f64, conditioned_on: Subsystem) -> Result<f64> {
    let q = tsallis_order(q)?;
    Ok(StateSpectra::of(rho)?.conditional_tsallis(q, conditioned_on))
}

/// Conditional Rényi entropy `S_q(AB) - S_q(C)`.
pub fn conditional_renyi(rho: &DensityMatrix4, params: EntropyParams, conditioned_on: Subsystem) -> Result<f64> {
    let order = params.order.checked()?;
    let s = StateSpectra::of(rho)?.conditional_renyi_nats(order, conditioned_on);
    Ok(params.base.from_nats(s))
}

pub fn classical_inequalities_hold(rho: &DensityMatrix4, qset: &[Order]) -> Result<bool> {
    for o in qset {
        o.checked()?;
    }
    Ok(StateSpectra::of(rho)?.classical_inequalities_hold(qset))
}

/// Wootters' `lambda_i` (descending) and the concurrence built from them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcurrenceDetail {
    pub lambdas: [f64; 4],
    pub value: f64,
}

/// Concurrence from a precomputed eigensystem of `rho`.
///
/// The `lambda_i^2` are the eigenvalues of `rho rho~`, which equal those of
/// the Hermitian `sqrt(rho) rho~ sqrt(rho)`; the latter is what gets
/// diagonalized.
pub fn concurrence_with(rho: &DensityMatrix4, eig: &EigenSystem<4>) -> Result<ConcurrenceDetail> {
    let roots = eig.values.map(|v| sqrt(v.max(0.0)));
    let s = Matrix4::conjugate_diagonal(&eig.vectors, &roots);
    let m = s * rho.spin_flip() * s;
    let mu = hermitian_eigenvalues(&m.hermitian_part())?;
    let lambdas = mu.map(|v| sqrt(v.max(0.0)));
    let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0);
    Ok(ConcurrenceDetail { lambdas, value })
}

pub fn concurrence(rho: &DensityMatrix4) -> Result<ConcurrenceDetail> {
    concurrence_with(rho, &hermitian_eigensystem(rho.matrix())?)
}

/// `max(0, p1 - p3 - 2 sqrt(p2 p4))`.
pub fn concurrence_ih(p: &Spectrum4) -> f64 {
    let [p1, p2, p3, p4] = p.values();
    (p1 - p3 - 2.0 * sqrt(p2 * p4)).max(0.0)
}

/// `-x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |t: f64| if t > 0.0 { -t * ln(t) } else { 0.0 };
    (term(x) + term(1.0 - x)) / core::f64::consts::LN_2
}

/// Entanglement of formation in bits, `h((1 + sqrt(1 - C^2)) / 2)`.
/// `c` is clamped to `[0, 1]`.
pub fn entanglement_of_formation(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + sqrt(1.0 - c * c)) / 2.0)
}

/// `1 / Tr(rho^2)`, from the matrix entries.
pub fn participation_ratio(rho: &DensityMatrix4) -> f64 {
    1.0 / rho.matrix().frobenius_sq()
}

/// `1 - Tr(rho^2)`.
pub fn linear_entropy(rho: &DensityMatrix4) -> f64 {
    1.0 - rho.matrix().frobenius_sq()
}

/// Magic basis columns: `|Phi+>, i|Phi->, i|Psi+>, |Psi->`.
fn magic_basis() -> Matrix4 {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let r = C64::new(h, 0.0);
    let i = C64::new(0.0, h);
    let z = C64::new(0.0, 0.0);
    Matrix([[r, i, z, z], [z, z, i, r], [z, z, i, -r], [r, -i, z, z]])
}

/// Largest overlap `<Phi|rho|Phi>` over maximally entangled `|Phi>`.
///
/// In the magic basis maximally entangled states are real unit vectors up
/// to a global phase, so the maximum is the top eigenvalue of the real part
/// of `rho` written in that basis.
pub fn fully_entangled_fraction(rho: &DensityMatrix4) -> Result<f64> {
    let q = magic_basis();
    let in_magic = q.adjoint() * *rho.matrix() * q;
    let mut re = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            re.0[i][j] = C64::new(0.5 * (in_magic.0[i][j].re + in_magic.0[j][i].re), 0.0);
        }
    }
    Ok(hermitian_eigenvalues(&re)?[0])
}

pub fn min_partial_transpose_eigenvalue(rho: &DensityMatrix4) -> Result<f64> {
    Ok(hermitian_eigenvalues(&rho.partial_transpose(Subsystem::B))?[3])
}

/// Positive partial transpose, which for two qubits is separability.
pub fn is_ppt(rho: &DensityMatrix4) -> Result<bool> {
    Ok(min_partial_transpose_eigenvalue(rho)? >= -PPT_TOL)
}

/// Lower bound on the concurrence of IH states at participation ratio `r`:
/// `(sqrt(3R(4 - R)) - R) / (2R)`.
pub fn eq7_bound(r: f64) -> Result<f64> {
    if !(1.0..=3.0).contains(&r) {
        return Err(Error::OutOfRange { name: "R", value: r, expected: "[1, 3]" });
    }
    Ok(((sqrt(3.0 * r * (4.0 - r)) - r) / (2.0 * r)).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TsallisConditional {
    pub q: f64,
    pub a_given_b: f64,
    pub b_given_a: f64,
}

/// Every per-state quantity, from one eigendecomposition of each of
/// `rho`, `rho_A`, `rho_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureRecord {
    pub concurrence: f64,
    /// Bits.
    pub entanglement_of_formation: f64,
    pub participation_ratio: f64,
    pub lambda_max: f64,
    pub linear_entropy: f64,
    /// `S_inf(A|B)` in `base`.
    pub cond_renyi_inf_ab: f64,
    /// `S_inf(B|A)` in `base`.
    pub cond_renyi_inf_ba: f64,
    pub cond_tsallis: Vec<TsallisConditional>,
    pub fully_entangled_fraction: f64,
    pub ppt: bool,
    pub entangled: bool,
    pub classical_ineq_hold: bool,
    pub base: LogBase,
}

impl MeasureRecord {
    pub fn check_invariants(&self) -> Result<()> {
        const TOL: f64 = 1e-9;
        let checks = [
            ("R", self.participation_ratio, 1.0, 4.0),
            ("lambda_max", self.lambda_max, 0.25, 1.0),
            ("C", self.concurrence, 0.0, 1.0),
            ("E", self.entanglement_of_formation, 0.0, 1.0),
        ];
        for (name, value, lo, hi) in checks {
            if !(value >= lo - TOL && value <= hi + TOL) {
                return Err(Error::RecordInvariant { name, value });
            }
        }
        Ok(())
    }
}

/// Builds a [`MeasureRecord`]. `qset` drives the classical-inequality flag;
/// its finite entries and `q = 1` also get conditional Tsallis values.
pub fn measure_record(rho: &DensityMatrix4, qset: &[Order], base: LogBase) -> Result<MeasureRecord> {
    for o in qset {
        o.checked()?;
    }
    let eig = hermitian_eigensystem(rho.matrix())?;
    let spectra = StateSpectra::from_eigenvalues(rho, eig.values)?;
    let c = concurrence_with(rho, &eig)?.value;
    let cond_tsallis = qset
        .iter()
        .filter(|o| !matches!(o, Order::Infinity))
        .map(|o| {
            let q = o.value();
            TsallisConditional {
                q,
                a_given_b: spectra.conditional_tsallis(q, Subsystem::B),
                b_given_a: spectra.conditional_tsallis(q, Subsystem::A),
            }
        })
        .collect();
    let purity = rho.matrix().frobenius_sq();
    Ok(MeasureRecord {
        concurrence: c,
        entanglement_of_formation: entanglement_of_formation(c),
        participation_ratio: 1.0 / purity,
        lambda_max: spectra.ab[0],
        linear_entropy: 1.0 - purity,
        cond_renyi_inf_ab: base.from_nats(spectra.conditional_renyi_nats(Order::Infinity, Subsystem::B)),
        cond_renyi_inf_ba: base.from_nats(spectra.conditional_renyi_nats(Order::Infinity, Subsystem::A)),
        cond_tsallis,
        fully_entangled_fraction: fully_entangled_fraction(rho)?,
        ppt: is_ppt(rho)?,
        entangled: c > ENTANGLED_TOL,
        classical_ineq_hold: spectra.classical_inequalities_hold(qset),
        base,
    })
}
