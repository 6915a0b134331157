use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::poly::{Monomial, Poly};
use crate::real::Rational;

pub type SparseVec = BTreeMap<usize, Rational>;

/// Assigns column indices to `(component, monomial)` coordinates.
#[derive(Default)]
pub struct Coords {
    index: HashMap<(usize, Monomial), usize>,
}

impl Coords {
    pub fn vector(&mut self, parts: &[(usize, &Poly)]) -> SparseVec {
        let mut v = SparseVec::new();
        for (comp, p) in parts {
            for (m, c) in p.terms() {
                let next = self.index.len();
                let col = *self.index.entry((*comp, m.clone())).or_insert(next);
                let e = v.entry(col).or_insert_with(Rational::zero);
                *e += c;
                if e.is_zero() {
                    v.remove(&col);
                }
            }
        }
        v
    }
}

fn axpy(y: &mut SparseVec, a: &Rational, x: &SparseVec) {
    for (k, c) in x {
        let e = y.entry(*k).or_insert_with(Rational::zero);
        *e += a * c;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

/// Row echelon form that also records each row as a combination of the
/// inserted vectors.
#[derive(Default)]
pub struct Echelon {
    rows: Vec<(usize, SparseVec, SparseVec)>,
    inserted: usize,
}

impl Echelon {
    fn reduce(&self, mut v: SparseVec, mut combo: SparseVec) -> (SparseVec, SparseVec) {
        for (pivot, row, rc) in &self.rows {
            if let Some(c) = v.get(pivot).cloned() {
                let a = -c;
                axpy(&mut v, &a, row);
                axpy(&mut combo, &a, rc);
            }
        }
        (v, combo)
    }

    /// Adds `v`; when it depends on earlier vectors, returns the combination
    /// of inserted vectors that vanishes.
    pub fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let mut combo = SparseVec::new();
        combo.insert(self.inserted, Rational::from_integer(1.into()));
        self.inserted += 1;
        let (v, combo) = self.reduce(v, combo);
        let Some((&pivot, lead)) = v.iter().next() else {
            return Some(combo);
        };
        let inv = lead.recip();
        let v: SparseVec = v.iter().map(|(k, c)| (*k, c * &inv)).collect();
        let combo: SparseVec = combo.iter().map(|(k, c)| (*k, c * &inv)).collect();
        for (_, row, rc) in &mut self.rows {
            if let Some(c) = row.get(&pivot).cloned() {
                let a = -c;
                axpy(row, &a, &v);
                axpy(rc, &a, &combo);
            }
        }
        self.rows.push((pivot, v, combo));
        None
    }

    /// Whether `v` lies in the span, without inserting it.
    pub fn spans(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone(), SparseVec::new()).0.is_empty()
    }
}

/// Basis of the kernel of the map sending basis vector `k` to `images[k]`.
pub fn kernel(images: Vec<SparseVec>) -> Vec<SparseVec> {
    let mut e = Echelon::default();
    images.into_iter().filter_map(|v| e.insert(v)).collect()
}
