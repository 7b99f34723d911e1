#![allow(dead_code)]

use gkcat::model::{random_model, validate_model, IntMatrix, MatrixModel};
use gkcat::presentation::Presentation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> Presentation {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    Presentation::parse(&text).unwrap()
}

pub fn model(p: &Presentation, name: &str) -> MatrixModel {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    MatrixModel::from_json(p, &text).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The base model followed by `extra` random valid models derived from it.
pub fn models(p: &Presentation, base: &str, extra: usize, seed: u64) -> Vec<MatrixModel> {
    let base = model(p, base);
    let mut r = rng(seed);
    let mut out = vec![base.clone()];
    for i in 0..extra {
        let m = random_model(p, &base, 1 + i % 3, &mut r);
        assert!(validate_model(p, &m).unwrap().is_valid());
        out.push(m);
    }
    out
}

/// Determinant by expansion over all permutations (Heap's algorithm).
pub fn det_by_permutations(m: &IntMatrix) -> i128 {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1i128;
    let term = |perm: &[usize], sign: i128| -> i128 {
        perm.iter()
            .enumerate()
            .map(|(i, &j)| m.get(i, j) as i128)
            .product::<i128>()
            * sign
    };
    let mut total = term(&perm, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            total += term(&perm, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    total
}

/// Schoolbook product in i128, independent of the library's arithmetic.
pub fn naive_mul(a: &[Vec<i128>], b: &[Vec<i128>], inner: usize, cols: usize) -> Vec<Vec<i128>> {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn widen(m: &IntMatrix) -> Vec<Vec<i128>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect()
}

/// Largest absolute entry of `a - b`; shapes must agree.
pub fn max_residual(a: &IntMatrix, b: &IntMatrix) -> i128 {
    assert_eq!(a.shape(), b.shape());
    let (ra, rb) = (widen(a), widen(b));
    ra.iter()
        .flatten()
        .zip(rb.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or(0)
}
