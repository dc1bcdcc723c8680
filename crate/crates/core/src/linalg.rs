//! Fixed-size complex linear algebra for the four-level problem.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec4 = [C64; 4];
pub type Mat4 = [[C64; 4]; 4];
pub type Mat2 = [[C64; 2]; 2];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn zeros() -> Mat4 {
    [[ZERO; 4]; 4]
}

pub fn identity() -> Mat4 {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn mat_vec(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [ZERO; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn adjoint(m: &Mat4) -> Mat4 {
    let mut out = zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = m[j][i].conj();
        }
    }
    out
}

pub fn add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = *a;
    for (ro, rb) in out.iter_mut().zip(b) {
        for (x, y) in ro.iter_mut().zip(rb) {
            *x += y;
        }
    }
    out
}

pub fn scale(m: &Mat4, s: C64) -> Mat4 {
    let mut out = *m;
    out.iter_mut().flatten().for_each(|x| *x *= s);
    out
}

pub fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
    add(a, &scale(b, -ONE))
}

/// Frobenius norm.
pub fn norm(m: &Mat4) -> f64 {
    m.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &Mat4) -> C64 {
    (0..4).map(|i| m[i][i]).sum()
}

/// ⟨u|v⟩
pub fn inner(u: &Vec4, v: &Vec4) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &Vec4) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// |v⟩⟨v|
pub fn outer(v: &Vec4) -> Mat4 {
    let mut out = zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = v[i] * v[j].conj();
        }
    }
    out
}

/// Largest |m_ij - conj(m_ji)|.
pub fn hermitian_deviation(m: &Mat4) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..4 {
        for j in i..4 {
            dev = dev.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    dev
}

fn off_diagonal_norm(m: &Mat4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += m[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi diagonalization of a Hermitian 4×4 matrix.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors
/// (as rows of the second array, i.e. `vecs[k]` belongs to `vals[k]`).
pub fn jacobi_eigh(h: &Mat4) -> ([f64; 4], [Vec4; 4]) {
    let mut a = *h;
    let mut v = identity();
    let scale_ref = norm(h);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= f64::EPSILON * 1e-2 * scale_ref.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[p][q];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g;
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // J = Φ·P with Φ_qq = e^{-iφ}: rotates the (p, q) block so a_pq vanishes.
                let mut j = identity();
                j[p][p] = C64::new(c, 0.0);
                j[p][q] = C64::new(s, 0.0);
                j[q][p] = -phase.conj() * s;
                j[q][q] = phase.conj() * c;

                a = mat_mul(&adjoint(&j), &mat_mul(&a, &j));
                a[p][q] = ZERO;
                a[q][p] = ZERO;
                for k in 0..4 {
                    a[k][k] = C64::new(a[k][k].re, 0.0);
                }
                v = mat_mul(&v, &j);
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| a[x][x].re.total_cmp(&a[y][y].re));
    let mut vals = [0.0; 4];
    let mut vecs = [[ZERO; 4]; 4];
    for (k, &idx) in order.iter().enumerate() {
        vals[k] = a[idx][idx].re;
        for r in 0..4 {
            vecs[k][r] = v[r][idx];
        }
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(seed: u64) -> Mat4 {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = zeros();
        for i in 0..4 {
            m[i][i] = C64::new(next(), 0.0);
            for j in (i + 1)..4 {
                let z = C64::new(next(), next());
                m[i][j] = z;
                m[j][i] = z.conj();
            }
        }
        m
    }

    #[test]
    fn zero_matrix_gives_identity_basis() {
        let (vals, vecs) = jacobi_eigh(&zeros());
        assert_eq!(vals, [0.0; 4]);
        for (k, v) in vecs.iter().enumerate() {
            for (r, x) in v.iter().enumerate() {
                assert_eq!(*x, if r == k { ONE } else { ZERO });
            }
        }
    }

    #[test]
    fn spectral_reconstruction_of_random_hermitian() {
        for seed in 1..200 {
            let h = lcg_matrix(seed);
            let (vals, vecs) = jacobi_eigh(&h);
            let mut recon = zeros();
            for (l, v) in vals.iter().zip(&vecs) {
                recon = add(&recon, &scale(&outer(v), C64::new(*l, 0.0)));
            }
            assert!(max_abs(&sub(&recon, &h)) < 1e-12, "seed {seed}");
            for w in vals.windows(2) {
                assert!(w[0] <= w[1]);
            }
            for a in 0..4 {
                for b in 0..4 {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((inner(&vecs[a], &vecs[b]) - expect).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let mut h = zeros();
        h[0][0] = C64::new(3.0, 0.0);
        h[1][1] = C64::new(-1.0, 0.0);
        h[2][2] = C64::new(2.0, 0.0);
        h[3][3] = C64::new(0.5, 0.0);
        let (vals, _) = jacobi_eigh(&h);
        assert_eq!(vals, [-1.0, 0.5, 2.0, 3.0]);
    }
}
