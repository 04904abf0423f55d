//! Small dense complex matrices: products, LU solves, the matrix exponential
//! and Hessenberg QR eigenvalues. Sized for companion matrices of low-order
//! evolution operators, not for large systems.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .unwrap_or(col);
            if a[(pivot, col)].norm() == 0.0 {
                return Err(invalid("singular matrix in LU solve"));
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    b.data.swap(pivot * n + j, col * n + j);
                }
            }
            let inv = ONE / a[(col, col)];
            for row in col + 1..n {
                let factor = a[(row, col)] * inv;
                if factor == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(row, j)] -= factor * v;
                }
                for j in 0..n {
                    let v = b[(col, j)];
                    b[(row, j)] -= factor * v;
                }
            }
        }
        for col in (0..n).rev() {
            let inv = ONE / a[(col, col)];
            for j in 0..n {
                let mut acc = b[(col, j)];
                for k in col + 1..n {
                    acc -= a[(col, k)] * b[(k, j)];
                }
                b[(col, j)] = acc * inv;
            }
        }
        Ok(b)
    }

    /// Parlett–Reinsch balancing with powers of two. Returns `(D^-1 A D, d)`.
    fn balance(&self) -> (Self, Vec<f64>) {
        let n = self.n;
        let mut a = self.clone();
        let mut d = vec![1.0; n];
        let mut converged = false;
        while !converged {
            converged = true;
            for i in 0..n {
                let mut c = 0.0;
                let mut r = 0.0;
                for j in 0..n {
                    if j != i {
                        c += a[(j, i)].norm();
                        r += a[(i, j)].norm();
                    }
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let total = c + r;
                let mut f = 1.0;
                while c < r / 2.0 {
                    c *= 2.0;
                    r /= 2.0;
                    f *= 2.0;
                }
                while c > r * 2.0 {
                    c /= 2.0;
                    r *= 2.0;
                    f /= 2.0;
                }
                if (c + r) < 0.95 * total {
                    converged = false;
                    d[i] *= f;
                    for j in 0..n {
                        a[(i, j)] /= f;
                        a[(j, i)] *= f;
                    }
                }
            }
        }
        (a, d)
    }

    /// Matrix exponential by scaling and squaring around a diagonal Padé
    /// approximant of degree 3 to 13, applied after balancing.
    pub fn expm(&self) -> Result<Self> {
        let (balanced, d) = self.balance();
        let e = pade_expm(&balanced)?;
        let n = self.n;
        let out = Self::from_fn(n, |i, j| e[(i, j)] * (d[i] / d[j]));
        if !out.is_finite() {
            return Err(Error::InvalidArgument("matrix exponential overflow".into()));
        }
        Ok(out)
    }

    /// Eigenvalues by the shifted QR iteration. The matrix must be upper
    /// Hessenberg.
    pub fn hessenberg_eigenvalues(&self) -> Result<Vec<C64>> {
        let n = self.n;
        for i in 2..n {
            for j in 0..i - 1 {
                if self[(i, j)] != ZERO {
                    return Err(invalid("matrix is not upper Hessenberg"));
                }
            }
        }
        let mut h = self.clone();
        let mut eig = Vec::with_capacity(n);
        let mut hi = n;
        let mut iter = 0usize;
        let mut total = 0usize;
        while hi > 0 {
            if hi == 1 {
                eig.push(h[(0, 0)]);
                break;
            }
            let mut l = hi - 1;
            while l > 0 {
                let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
                let sub = h[(l, l - 1)].norm();
                if sub <= f64::EPSILON * s || sub < f64::MIN_POSITIVE {
                    h[(l, l - 1)] = ZERO;
                    break;
                }
                l -= 1;
            }
            if l == hi - 1 {
                eig.push(h[(hi - 1, hi - 1)]);
                hi -= 1;
                iter = 0;
                continue;
            }
            iter += 1;
            total += 1;
            if total > 100 * n {
                return Err(Error::NoConvergence {
                    iterations: total,
                    last_change: h[(hi - 1, hi - 2)].norm(),
                });
            }
            let a = h[(hi - 2, hi - 2)];
            let b = h[(hi - 2, hi - 1)];
            let c = h[(hi - 1, hi - 2)];
            let dd = h[(hi - 1, hi - 1)];
            let mu = if iter % 11 == 10 {
                // exceptional shift to break cycles
                dd + C64::new(0.75 * c.norm(), 0.0)
            } else {
                let half = (a + dd) * 0.5;
                let disc = ((a - dd) * (a - dd) * 0.25 + b * c).sqrt();
                let m1 = half + disc;
                let m2 = half - disc;
                if (m1 - dd).norm() <= (m2 - dd).norm() {
                    m1
                } else {
                    m2
                }
            };
            for k in l..hi {
                h[(k, k)] -= mu;
            }
            let mut rotations = Vec::with_capacity(hi - l);
            for k in l..hi - 1 {
                let x = h[(k, k)];
                let y = h[(k + 1, k)];
                let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
                let (cs, sn) = if r == 0.0 { (ONE, ZERO) } else { (x / r, y / r) };
                for j in k..hi {
                    let top = h[(k, j)];
                    let bot = h[(k + 1, j)];
                    h[(k, j)] = cs.conj() * top + sn.conj() * bot;
                    h[(k + 1, j)] = -sn * top + cs * bot;
                }
                rotations.push((cs, sn));
            }
            for (offset, &(cs, sn)) in rotations.iter().enumerate() {
                let k = l + offset;
                for i in l..hi {
                    let left = h[(i, k)];
                    let right = h[(i, k + 1)];
                    h[(i, k)] = left * cs + right * sn;
                    h[(i, k + 1)] = -left * sn.conj() + right * cs.conj();
                }
            }
            for k in l..hi {
                h[(k, k)] += mu;
            }
        }
        Ok(eig)
    }
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off` (Sturm sequence count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (x.abs() + 1e-300);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest and largest eigenvalue of a real symmetric tridiagonal matrix,
/// by bisection.
pub fn tridiagonal_extremes(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    assert!(n > 0 && off.len() + 1 == n, "tridiagonal shape mismatch");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let find = |k: usize| {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, off, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    };
    (find(0), find(n - 1))
}

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

fn pade_coefficients(degree: usize) -> &'static [f64] {
    match degree {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[
            17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
        ],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        _ => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
    }
}

fn pade_expm(a: &CMatrix) -> Result<CMatrix> {
    let n = a.dim();
    let id = CMatrix::identity(n);
    let norm = a.norm1();
    if !norm.is_finite() {
        return Err(invalid("matrix exponential of a non-finite matrix"));
    }
    for &(degree, theta) in &THETA {
        if norm <= theta {
            let b = pade_coefficients(degree);
            let a2 = a.mul(a);
            let mut even = id.scale(C64::new(b[0], 0.0));
            let mut odd = id.scale(C64::new(b[1], 0.0));
            let mut power = id.clone();
            for k in 1..=degree / 2 {
                power = power.mul(&a2);
                even = even.add(&power.scale(C64::new(b[2 * k], 0.0)));
                odd = odd.add(&power.scale(C64::new(b[2 * k + 1], 0.0)));
            }
            let u = a.mul(&odd);
            return even.sub(&u).solve(&even.add(&u));
        }
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(C64::new(2f64.powi(-s), 0.0));
    let b = pade_coefficients(13);
    let c = |k: usize| C64::new(b[k], 0.0);
    let a2 = scaled.mul(&scaled);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);
    let inner_u = a6
        .scale(c(13))
        .add(&a4.scale(c(11)))
        .add(&a2.scale(c(9)));
    let u = scaled.mul(
        &a6.mul(&inner_u)
            .add(&a6.scale(c(7)))
            .add(&a4.scale(c(5)))
            .add(&a2.scale(c(3)))
            .add(&id.scale(c(1))),
    );
    let inner_v = a6
        .scale(c(12))
        .add(&a4.scale(c(10)))
        .add(&a2.scale(c(8)));
    let v = a6
        .mul(&inner_v)
        .add(&a6.scale(c(6)))
        .add(&a4.scale(c(4)))
        .add(&a2.scale(c(2)))
        .add(&id.scale(c(0)));
    let mut r = v.sub(&u).solve(&v.add(&u))?;
    for _ in 0..s {
        r = r.mul(&r);
    }
    Ok(r)
}
