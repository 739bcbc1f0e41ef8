//! Straightforward reimplementations used as references. They share no
//! code with the library beyond the parameter structs.
#![allow(dead_code)]

use eit_core::AtomParams;
use num_complex::Complex64 as C;

pub type Mat3 = [[C; 3]; 3];

pub fn zero3() -> Mat3 {
    [[C::new(0.0, 0.0); 3]; 3]
}

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = zero3();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

/// Rotating-frame Hamiltonian (ħ = 1), levels ordered a, b, c.
pub fn hamiltonian(atom: &AtomParams<f64>, omega_p: C, omega_c: C) -> Mat3 {
    let mut h = zero3();
    h[1][1] = C::new(-atom.delta_ab, 0.0);
    h[2][2] = C::new(-atom.delta_ac, 0.0);
    h[0][1] = -omega_p / 2.0;
    h[1][0] = -omega_p.conj() / 2.0;
    h[0][2] = -omega_c / 2.0;
    h[2][0] = -omega_c.conj() / 2.0;
    h
}

/// `−i[H, ρ]` followed by element-wise damping with the given rates.
pub fn bloch_rhs_matrix(rho: &Mat3, atom: &AtomParams<f64>, omega_p: C, omega_c: C) -> Mat3 {
    let h = hamiltonian(atom, omega_p, omega_c);
    let hr = matmul(&h, rho);
    let rh = matmul(rho, &h);
    let gamma = [
        [atom.gamma_aa, atom.gamma_ab, atom.gamma_ac],
        [atom.gamma_ab, atom.gamma_bb, atom.gamma_bc],
        [atom.gamma_ac, atom.gamma_bc, atom.gamma_cc],
    ];
    let mut d = zero3();
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = C::new(0.0, -1.0) * (hr[i][j] - rh[i][j]) - rho[i][j] * gamma[i][j];
        }
    }
    d
}

/// Real roots of a monic quadratic found by scanning `[lo, hi]` for sign
/// changes and bisecting each bracket to full precision.
pub fn scan_roots(b: f64, c: f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let f = |v: f64| v * v + b * v + c;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for k in 1..=n {
        let x1 = lo + (hi - lo) * k as f64 / n as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut z) = (x0, x1);
            for _ in 0..200 {
                let m = 0.5 * (a + z);
                if f(a) * f(m) <= 0.0 {
                    z = m;
                } else {
                    a = m;
                }
            }
            roots.push(0.5 * (a + z));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// `χ(Δ)` and `dχ/dΔ` written out by hand.
pub fn chi_and_derivative(delta: f64, kappa: f64, g_ab: f64, g_bc: f64, omega_c2: f64) -> (C, C) {
    let n = C::new(delta, g_bc);
    let m = C::new(delta, g_ab);
    let d = n * m - omega_c2 / 4.0;
    let chi = -kappa * n / d;
    // d/dΔ of −κ n/d with dn = 1, dd = n + m
    let dchi = -kappa * (d - n * (n + m)) / (d * d);
    (chi, dchi)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> C>(f: F, a: f64, b: f64, n: usize) -> C {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + h * k as f64) * w;
    }
    s * (h / 3.0)
}

/// `y0 e^{−λt} + ∫₀ᵗ s(t') e^{λ(t'−t)} dt'` by Simpson's rule.
pub fn relax_simpson<F: Fn(f64) -> C>(lambda: f64, s: F, y0: C, t: f64, n: usize) -> C {
    y0 * (-lambda * t).exp() + simpson(|u| s(u) * (lambda * (u - t)).exp(), 0.0, t, n)
}

/// Determinant of a 3×3 complex matrix.
pub fn det3(m: &Mat3) -> C {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn trace_of_square(m: &Mat3) -> C {
    let sq = matmul(m, m);
    sq[0][0] + sq[1][1] + sq[2][2]
}
