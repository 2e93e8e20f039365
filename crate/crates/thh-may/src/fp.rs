//! Exact linear algebra over the prime field F_p.
//!
//! Everything downstream (degreewise bases, comodule primitives, page
//! homology) reduces to row reduction, kernels, and subquotients of small
//! dense matrices with entries reduced mod p. Pivoting is deterministic
//! (leftmost nonzero) so bases and golden files are reproducible.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An odd prime p ≥ 3. The characteristic of every algebra in this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prime(u32);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FpError {
    #[error("{0} is not an odd prime >= 3")]
    NotOddPrime(u32),
    #[error("matrix dimension mismatch: {0}")]
    Shape(String),
    #[error("boundaries are not contained in the cycle span")]
    BoundariesNotInCycles,
    #[error("vector is not in the cycle span")]
    NotACycle,
}

impl Prime {
    pub fn new(p: u32) -> Result<Prime, FpError> {
        if p < 3 || p.is_multiple_of(2) {
            return Err(FpError::NotOddPrime(p));
        }
        let mut d = 3;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(FpError::NotOddPrime(p));
            }
            d += 2;
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, n: u64) -> u32 {
        (n % self.0 as u64) as u32
    }

    /// Reduce a signed integer into [0, p).
    #[inline]
    pub fn reduce_signed(self, n: i64) -> u32 {
        let p = self.0 as i64;
        (((n % p) + p) % p) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Multiplicative inverse via Fermat: a^(p-2).
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "inverse of zero mod {}", self.0);
        self.pow(a, self.0 - 2)
    }

    pub fn pow(self, mut base: u32, mut e: u32) -> u32 {
        base %= self.0;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// n! mod p (vanishes for n >= p).
    pub fn factorial(self, n: u64) -> u32 {
        if n >= self.0 as u64 {
            return 0;
        }
        let mut acc = 1u32;
        for k in 2..=n as u32 {
            acc = self.mul(acc, k);
        }
        acc
    }
}

/// Dense matrix over F_p, row-major, entries reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl FpMatrix {
    pub fn zero(p: Prime, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix {
            p,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> FpMatrix {
        let mut m = FpMatrix::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: Prime, cols: usize, rows: &[Vec<u32>]) -> FpMatrix {
        let mut m = FpMatrix::zero(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v % p.get());
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.cols + j] = v % self.p.get();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix-vector product m·v.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..self.cols {
                    acc += self.get(i, j) as u64 * v[j] as u64;
                }
                self.p.reduce(acc)
            })
            .collect()
    }

    /// Reduced row-echelon form together with the pivot column list.
    ///
    /// Deterministic: pivots are chosen leftmost-first scanning rows top to
    /// bottom, so identical inputs give identical outputs.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    let (a, b) = (m.get(r, j), m.get(pr, j));
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = p.inv(m.get(r, c));
            for j in 0..m.cols {
                m.set(r, j, p.mul(m.get(r, j), inv));
            }
            for i in 0..m.rows {
                if i != r && m.get(i, c) != 0 {
                    let f = m.get(i, c);
                    for j in 0..m.cols {
                        let v = p.sub(m.get(i, j), p.mul(f, m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of ker(m) as column vectors. Count = cols − rank.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let p = self.p;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = p.neg(r.get(row, free));
            }
            basis.push(v);
        }
        basis
    }
}

/// A subquotient cycles/boundaries of F_p^n with a chosen representative
/// section and a deterministic reduction map onto class coordinates.
#[derive(Clone, Debug)]
pub struct Subquotient {
    p: Prime,
    dim_ambient: usize,
    /// RREF rows spanning the boundaries.
    boundary_rref: Vec<Vec<u32>>,
    boundary_pivots: Vec<usize>,
    /// Representatives of the quotient basis, RREF-normalized after boundary
    /// reduction; their pivot columns are disjoint from the boundary pivots.
    reps: Vec<Vec<u32>>,
    rep_pivots: Vec<usize>,
    /// RREF of the cycle space, for membership tests.
    cycle_rref: Vec<Vec<u32>>,
    cycle_pivots: Vec<usize>,
}

fn reduce_against(p: Prime, v: &mut [u32], rows: &[Vec<u32>], pivots: &[usize]) {
    for (row, &pc) in rows.iter().zip(pivots) {
        let f = v[pc];
        if f != 0 {
            for j in 0..v.len() {
                v[j] = p.sub(v[j], p.mul(f, row[j]));
            }
        }
    }
}

impl Subquotient {
    /// Build the subquotient span(cycles)/span(boundaries).
    ///
    /// Errors if the boundaries are not contained in the cycle span (an
    /// inconsistent differential upstream).
    pub fn new(
        p: Prime,
        dim_ambient: usize,
        cycles: &[Vec<u32>],
        boundaries: &[Vec<u32>],
    ) -> Result<Subquotient, FpError> {
        let cyc = FpMatrix::from_rows(p, dim_ambient, cycles);
        let (cyc_r, cyc_p) = cyc.rref();
        let cycle_rref: Vec<Vec<u32>> = (0..cyc_p.len()).map(|i| cyc_r.row(i).to_vec()).collect();

        for b in boundaries {
            let mut v = b.clone();
            for x in v.iter_mut() {
                *x %= p.get();
            }
            reduce_against(p, &mut v, &cycle_rref, &cyc_p);
            if v.iter().any(|&x| x != 0) {
                return Err(FpError::BoundariesNotInCycles);
            }
        }

        let bnd = FpMatrix::from_rows(p, dim_ambient, boundaries);
        let (bnd_r, bnd_p) = bnd.rref();
        let boundary_rref: Vec<Vec<u32>> = (0..bnd_p.len()).map(|i| bnd_r.row(i).to_vec()).collect();

        // Reduce the cycle basis modulo boundaries, then re-echelonize to get
        // canonical representatives.
        let mut reduced: Vec<Vec<u32>> = Vec::new();
        for row in &cycle_rref {
            let mut v = row.clone();
            reduce_against(p, &mut v, &boundary_rref, &bnd_p);
            reduced.push(v);
        }
        let red = FpMatrix::from_rows(p, dim_ambient, &reduced);
        let (red_r, red_p) = red.rref();
        let reps: Vec<Vec<u32>> = (0..red_p.len()).map(|i| red_r.row(i).to_vec()).collect();

        Ok(Subquotient {
            p,
            dim_ambient,
            boundary_rref,
            boundary_pivots: bnd_p,
            reps,
            rep_pivots: red_p,
            cycle_rref,
            cycle_pivots: cyc_p,
        })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim_ambient
    }

    pub fn representatives(&self) -> &[Vec<u32>] {
        &self.reps
    }

    pub fn boundary_dim(&self) -> usize {
        self.boundary_rref.len()
    }

    pub fn is_cycle(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        reduce_against(self.p, &mut w, &self.cycle_rref, &self.cycle_pivots);
        w.iter().all(|&x| x == 0)
    }

    /// Express the class of an ambient vector in representative coordinates.
    ///
    /// Errors if the vector is not a cycle.
    pub fn class_coords(&self, v: &[u32]) -> Result<Vec<u32>, FpError> {
        assert_eq!(v.len(), self.dim_ambient);
        if !self.is_cycle(v) {
            return Err(FpError::NotACycle);
        }
        let mut w = v.to_vec();
        reduce_against(self.p, &mut w, &self.boundary_rref, &self.boundary_pivots);
        let coords: Vec<u32> = self.rep_pivots.iter().map(|&c| w[c]).collect();
        for (i, rep) in self.reps.iter().enumerate() {
            let f = coords[i];
            if f != 0 {
                for j in 0..w.len() {
                    w[j] = self.p.sub(w[j], self.p.mul(f, rep[j]));
                }
            }
        }
        debug_assert!(w.iter().all(|&x| x == 0), "reduction left a remainder");
        Ok(coords)
    }
}

/// Rank of a sparse matrix given as rows of (column, coefficient) maps.
///
/// Markowitz-style pivoting: pick the lightest column, then the lightest row
/// in it, to keep fill-in down. Rows are sorted coordinate vectors; column
/// incidence lists are maintained lazily. Destroys its input.
pub fn sparse_rank(p: Prime, rows_in: Vec<std::collections::BTreeMap<u32, u32>>) -> usize {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut rows: Vec<Vec<(u32, u32)>> = rows_in
        .into_iter()
        .map(|r| r.into_iter().collect())
        .collect();
    let n_cols = rows
        .iter()
        .flat_map(|r| r.iter().map(|&(c, _)| c as usize + 1))
        .max()
        .unwrap_or(0);
    let mut col_count = vec![0u32; n_cols];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n_cols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r {
            col_count[c as usize] += 1;
            col_rows[c as usize].push(i as u32);
        }
    }
    // lazy min-heap over (count, col); stale entries are skipped on pop
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = (0..n_cols)
        .filter(|&c| col_count[c] > 0)
        .map(|c| Reverse((col_count[c], c as u32)))
        .collect();
    let mut alive = vec![true; rows.len()];
    let mut rank = 0usize;

    let entry = |row: &[(u32, u32)], c: u32| -> Option<u32> {
        row.binary_search_by_key(&c, |&(cc, _)| cc)
            .ok()
            .map(|i| row[i].1)
    };

    while let Some(Reverse((cnt, pc))) = heap.pop() {
        let pcu = pc as usize;
        if col_count[pcu] == 0 || cnt != col_count[pcu] {
            continue; // stale
        }
        // refresh incidence for this column and pick the lightest row
        col_rows[pcu].retain(|&i| alive[i as usize] && entry(&rows[i as usize], pc).is_some());
        let Some(&pr) = col_rows[pcu]
            .iter()
            .min_by_key(|&&i| rows[i as usize].len())
        else {
            col_count[pcu] = 0;
            continue;
        };
        let pr = pr as usize;
        rank += 1;
        alive[pr] = false;
        let inv = p.inv(entry(&rows[pr], pc).unwrap());
        let pivot_row: Vec<(u32, u32)> =
            rows[pr].iter().map(|&(c, v)| (c, p.mul(v, inv))).collect();
        for &(c, _) in &pivot_row {
            col_count[c as usize] -= 1;
            if col_count[c as usize] > 0 {
                heap.push(Reverse((col_count[c as usize], c)));
            }
        }
        rows[pr] = Vec::new();

        let victims: Vec<u32> = col_rows[pcu]
            .iter()
            .copied()
            .filter(|&i| i as usize != pr)
            .collect();
        for i in victims {
            let iu = i as usize;
            let Some(f) = entry(&rows[iu], pc) else { continue };
            // merged row = row − f · pivot_row
            let old = std::mem::take(&mut rows[iu]);
            let mut merged = Vec::with_capacity(old.len() + pivot_row.len());
            let (mut a, mut b) = (0usize, 0usize);
            while a < old.len() || b < pivot_row.len() {
                if b >= pivot_row.len() || (a < old.len() && old[a].0 < pivot_row[b].0) {
                    merged.push(old[a]);
                    a += 1;
                } else if a >= old.len() || pivot_row[b].0 < old[a].0 {
                    let (c, v) = pivot_row[b];
                    b += 1;
                    let nv = p.neg(p.mul(f, v));
                    if nv != 0 {
                        merged.push((c, nv));
                        col_count[c as usize] += 1;
                        col_rows[c as usize].push(i);
                        heap.push(Reverse((col_count[c as usize], c)));
                    }
                } else {
                    let (c, v_old) = old[a];
                    let (_, v_piv) = pivot_row[b];
                    a += 1;
                    b += 1;
                    let nv = p.sub(v_old, p.mul(f, v_piv));
                    if nv != 0 {
                        merged.push((c, nv));
                    } else {
                        col_count[c as usize] -= 1;
                        heap.push(Reverse((col_count[c as usize], c)));
                    }
                }
            }
            rows[iu] = merged;
        }
        col_count[pcu] = 0;
        col_rows[pcu].clear();
    }
    rank
}

/// Basis of cycles/boundaries with a representative section, as a plain list.
pub fn subquotient_basis(
    p: Prime,
    space_dim: usize,
    cycles: &[Vec<u32>],
    boundaries: &[Vec<u32>],
) -> Result<Vec<Vec<u32>>, FpError> {
    Ok(Subquotient::new(p, space_dim, cycles, boundaries)?.reps)
}
