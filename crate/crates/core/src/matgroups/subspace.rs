use crate::arith::{inv_mod, mul_mod};
use crate::error::{Error, Result};
use crate::matgroups::group::sl2_generators;
use crate::matgroups::mat::Mat2;
use crate::matgroups::ring::{FiniteRingSpec, RingElem};

/// An F_p-subspace of M_2 of an F_p-algebra, kept in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatSubspace {
    p: u64,
    width: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

fn to_vec(m: &Mat2) -> Vec<u64> {
    m.entries.iter().flat_map(|e| e.0.iter().copied()).collect()
}

fn from_vec(spec: &FiniteRingSpec, v: &[u64]) -> Mat2 {
    let w = spec.width();
    Mat2 {
        entries: std::array::from_fn(|i| RingElem(v[i * w..(i + 1) * w].to_vec())),
    }
}

impl MatSubspace {
    pub fn zero(spec: &FiniteRingSpec) -> Result<Self> {
        if !spec.is_fp_algebra() {
            return Err(Error::invalid(format!("{spec} is not an F_p-algebra")));
        }
        Ok(MatSubspace { p: spec.p(), width: 4 * spec.width(), rows: Vec::new(), pivots: Vec::new() })
    }

    pub fn span(spec: &FiniteRingSpec, mats: &[Mat2]) -> Result<Self> {
        let mut s = Self::zero(spec)?;
        for m in mats {
            s.insert(&to_vec(m));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self, spec: &FiniteRingSpec) -> Vec<Mat2> {
        self.rows.iter().map(|r| from_vec(spec, r)).collect()
    }

    /// Reduce `v` against the echelon basis.
    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut v = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + p - mul_mod(c, *r, p)) % p;
                }
            }
        }
        v
    }

    pub fn contains(&self, m: &Mat2) -> bool {
        self.reduce(&to_vec(m)).iter().all(|&x| x == 0)
    }

    /// Add a vector; returns whether the dimension grew.
    fn insert(&mut self, v: &[u64]) -> bool {
        let p = self.p;
        let mut v = self.reduce(v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[piv], p).expect("nonzero in a field");
        for x in v.iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x = (*x + p - mul_mod(c, *y, p)) % p;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < piv);
        self.rows.insert(pos, v);
        self.pivots.insert(pos, piv);
        true
    }

    pub fn insert_mat(&mut self, m: &Mat2) -> bool {
        self.insert(&to_vec(m))
    }

    pub fn is_subspace_of(&self, other: &MatSubspace) -> bool {
        self.rows.iter().all(|r| other.reduce(r).iter().all(|&x| x == 0))
    }

    /// Kernel of a linear map given by its images of the standard basis.
    fn kernel(spec: &FiniteRingSpec, images: &[Vec<u64>]) -> Result<Self> {
        let p = spec.p();
        let n = images.len();
        let m = images.first().map_or(0, Vec::len);
        // Solve via RREF of the m x n matrix.
        let mut a: Vec<Vec<u64>> = (0..m).map(|i| (0..n).map(|j| images[j][i]).collect()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(pr) = (r..m).find(|&i| a[i][c] != 0) else { continue };
            a.swap(r, pr);
            let inv = inv_mod(a[r][c], p).expect("field");
            for x in a[r].iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
            for i in 0..m {
                if i != r && a[i][c] != 0 {
                    let f = a[i][c];
                    let row = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&row) {
                        *x = (*x + p - mul_mod(f, *y, p)) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut s = Self::zero(spec)?;
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u64; n];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[row][free]) % p;
            }
            s.insert(&v);
        }
        Ok(s)
    }
}

/// (matrices with trace in F_p, trace-zero matrices, scalars F_p * I).
pub fn trace_subspaces(spec: &FiniteRingSpec) -> Result<(MatSubspace, MatSubspace, MatSubspace)> {
    if !spec.is_fp_algebra() {
        return Err(Error::invalid(format!("{spec} is not an F_p-algebra")));
    }
    let dim = 4 * spec.width();
    let basis: Vec<Mat2> = (0..dim)
        .map(|i| {
            let mut v = vec![0u64; dim];
            v[i] = 1;
            from_vec(spec, &v)
        })
        .collect();
    let ranges = spec.component_ranges();
    // Trace lies in F_p: every non-constant coordinate vanishes and all
    // constant coordinates agree.
    let hat_images: Vec<Vec<u64>> = basis
        .iter()
        .map(|m| {
            let t = m.trace(spec).0;
            let mut out = Vec::new();
            for r in &ranges {
                out.extend_from_slice(&t[r.start + 1..r.end]);
            }
            let c0 = t[ranges[0].start];
            for r in &ranges[1..] {
                out.push((t[r.start] + spec.p() - c0) % spec.p());
            }
            out
        })
        .collect();
    let hat = if hat_images.iter().all(Vec::is_empty) {
        MatSubspace::span(spec, &basis)?
    } else {
        MatSubspace::kernel(spec, &hat_images)?
    };
    let zero_images: Vec<Vec<u64>> = basis.iter().map(|m| m.trace(spec).0).collect();
    let trace_zero = MatSubspace::kernel(spec, &zero_images)?;
    let scalars = MatSubspace::span(spec, &[Mat2::identity(spec)])?;
    Ok((hat, trace_zero, scalars))
}

/// Smallest subspace containing `v` stable under conjugation by the
/// elementary generators of SL_2 of the ring.
pub fn adjoint_closure(spec: &FiniteRingSpec, v: &MatSubspace) -> Result<MatSubspace> {
    let (_, trace_zero, _) = trace_subspaces(spec)?;
    if !v.is_subspace_of(&trace_zero) {
        return Err(Error::invalid("seed subspace is not trace-zero"));
    }
    let gens: Vec<(Mat2, Mat2)> = sl2_generators(spec)
        .into_iter()
        .map(|g| {
            let gi = g.inverse(spec).expect("elementary matrices are invertible");
            (g, gi)
        })
        .collect();
    let mut out = v.clone();
    let mut queue = v.basis(spec);
    while let Some(x) = queue.pop() {
        for (g, gi) in &gens {
            let y = g.mul(spec, &x).mul(spec, gi);
            if out.insert_mat(&y) {
                queue.push(y);
            }
        }
    }
    Ok(out)
}
