//! Complex quadrature: adaptive Gauss–Kronrod (7/15) and fixed-order
//! Gauss–Legendre rules.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    ((kron * h), ((kron - gauss) * h).norm())
}

struct Piece {
    a: f64,
    b: f64,
    val: Complex64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// Bisects the worst interval until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    const MAX_PIECES: usize = 20_000;
    let mut heap = BinaryHeap::new();
    let (val, err) = gk15(&f, a, b);
    heap.push(Piece { a, b, val, err });
    let (mut total, mut total_err) = (val, err);
    loop {
        if !(total.re.is_finite() && total.im.is_finite() && total_err.is_finite()) {
            return Err(Error::QuadratureNonConvergent(total_err));
        }
        if total_err <= abs_tol.max(rel_tol * total.norm()) {
            // re-sum to shed accumulated rounding from the running updates
            return Ok(heap.iter().map(|p| p.val).sum());
        }
        if heap.len() >= MAX_PIECES {
            return Err(Error::QuadratureNonConvergent(total_err));
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergent(total_err));
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: mid, val: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, val: v2, err: e2 });
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=order {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            if order == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[order - 1 - i] = w[i];
    }
    (x, w)
}

/// Cached order-32 rule.
pub fn gauss_legendre_32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

/// Composite GL32 over `pieces` equal subintervals of `[a, b]`.
pub fn gl32_composite<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, pieces: usize) -> Complex64 {
    let (x, w) = gauss_legendre_32();
    let h = (b - a) / pieces as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..pieces {
        let lo = a + h * p as f64;
        let (c, r) = (lo + 0.5 * h, 0.5 * h);
        let mut s = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(w) {
            s += f(c + r * xi) * *wi;
        }
        acc += s * r;
    }
    acc
}

/// GL32 with subinterval halving until successive estimates agree to
/// `rel_tol` (or to `abs_floor`, whichever is looser).
pub fn gl32_refined<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<Complex64> {
    let mut pieces = 1;
    let mut prev = gl32_composite(f, a, b, pieces);
    for _ in 0..22 {
        pieces *= 2;
        let next = gl32_composite(f, a, b, pieces);
        let diff = (next - prev).norm();
        if diff <= (rel_tol * next.norm()).max(abs_floor) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergent((prev - gl32_composite(f, a, b, pieces / 2)).norm()))
}
