//! Explicit density matrices over physical indices. Exponential in the number
//! of sites; used as an oracle and for the two-region state `ρ_AC`.

use super::support::{spectrum_report, support_decomposition};
use crate::error::{Error, Result};
use crate::mps::IuMps;
use crate::numerics::{mat_power, ComplexMatrix, C64};

/// Largest explicit density dimension `d_sⁿ`.
pub const BRUTE_FORCE_CAP: usize = 1024;

fn checked_dim(d_s: usize, sites: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..sites {
        dim = dim.saturating_mul(d_s);
        if dim > BRUTE_FORCE_CAP {
            return Err(Error::TooLarge {
                dim,
                cap: BRUTE_FORCE_CAP,
            });
        }
    }
    Ok(dim)
}

/// `M_s = M^{s_n} ⋯ M^{s_1}` for every string, the first site being the most
/// significant digit of the string index.
pub fn string_products(mps: &IuMps, sites: usize) -> Result<Vec<ComplexMatrix>> {
    checked_dim(mps.d_s(), sites)?;
    let kraus = mps.kraus.matrices();
    let mut products = vec![ComplexMatrix::identity(mps.d_m())];
    for _ in 0..sites {
        let mut next = Vec::with_capacity(products.len() * kraus.len());
        for p in &products {
            for m in kraus {
                next.push(m * p);
            }
        }
        products = next;
    }
    Ok(products)
}

/// `⟨A, B⟩ = Σ_{ab} conj(A_ab) B_ab`.
fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum()
}

/// `ρₙ[s, s'] = tr(M_s σ M_{s'}†)`.
pub fn brute_force_density(mps: &IuMps, n: usize) -> Result<ComplexMatrix> {
    let products = string_products(mps, n)?;
    let left: Vec<ComplexMatrix> = products.iter().map(|m| m * &mps.sigma).collect();
    let dim = products.len();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = inner(&products[j], &left[i]);
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
    Ok(rho)
}

pub fn brute_force_entropy(mps: &IuMps, n: usize) -> Result<f64> {
    Ok(spectrum_report(&brute_force_density(mps, n)?, n)?.entropy)
}

/// Reduced state on `A ∪ C` with `len_b` traced sites in between, indexed as
/// `a · d_s^{len_c} + c`:
/// `ρ[(a,c),(a',c')] = tr(M_c ℰ^{len_b}(M_a σ M_{a'}†) M_{c'}†)`.
pub fn two_region_density(mps: &IuMps, len_a: usize, len_b: usize, len_c: usize) -> Result<ComplexMatrix> {
    let dim_a = checked_dim(mps.d_s(), len_a)?;
    let dim_c = checked_dim(mps.d_s(), len_c)?;
    checked_dim(mps.d_s(), len_a + len_c)?;
    let d = mps.d_m();
    let ma = string_products(mps, len_a)?;
    let mc = string_products(mps, len_c)?;
    let eb = mat_power(&mps.transfer.e, len_b as u64);

    let ma_sigma: Vec<ComplexMatrix> = ma.iter().map(|m| m * &mps.sigma).collect();
    // Y_{aa'} = ℰ^{len_b}(M_a σ M_{a'}†), computed on vec form.
    let mut y = vec![ComplexMatrix::zeros(d, d); dim_a * dim_a];
    for a in 0..dim_a {
        for ap in 0..dim_a {
            let x = &ma_sigma[a] * &ma[ap].adjoint();
            y[a * dim_a + ap] = ComplexMatrix::devectorize(&eb.mat_vec(&x.vectorize()), d)?;
        }
    }
    let dim = dim_a * dim_c;
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for a in 0..dim_a {
        for ap in 0..dim_a {
            let yy = &y[a * dim_a + ap];
            for c in 0..dim_c {
                let left = &mc[c] * yy;
                for cp in 0..dim_c {
                    rho[(a * dim_c + c, ap * dim_c + cp)] = inner(&mc[cp], &left);
                }
            }
        }
    }
    Ok(rho.hermitian_part())
}

/// The isometry `P = X W Σ^{-1/2}` onto the support of `ρₙ`, with
/// `X_{s,(a,b)} = (M_s)_{ab}`. Rows are physical strings.
pub fn explicit_isometry(mps: &IuMps, n: usize, threshold: f64) -> Result<ComplexMatrix> {
    let products = string_products(mps, n)?;
    let sp = support_decomposition(&mps.transfer, n, threshold)?;
    let d = mps.d_m();
    let k = sp.support_dim;
    let x = ComplexMatrix::from_fn(products.len(), d * d, |s, ab| products[s][(ab / d, ab % d)]);
    let cols: Vec<usize> = (0..k).collect();
    let wk = sp.w.select_columns(&cols);
    let xw = &x * &wk;
    Ok(ComplexMatrix::from_fn(xw.rows(), k, |i, j| {
        xw[(i, j)] / sp.sigma_diag[j].sqrt()
    }))
}
