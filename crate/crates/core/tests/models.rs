//! The bundled tables rebuilt from their defining descriptions.

use bitideal::variety::{builtin, find_bundled};
use bitideal::FiniteAlgebra;

fn table(variety: &str, name: &str, op: &str) -> (usize, Vec<usize>) {
    let spec = builtin(variety).unwrap();
    let alg: &FiniteAlgebra = find_bundled(&spec, name).unwrap();
    let n = alg.size();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            out.push(alg.apply_named(op, &[a, b]).unwrap());
        }
    }
    (n, out)
}

#[test]
fn s3_is_composition_of_permutations() {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [2, 1, 0], [0, 2, 1]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let (n, mul) = table("group", "S3", "mul");
    for a in 0..n {
        for b in 0..n {
            // b first, then a
            let ab = [0, 1, 2].map(|k| perms[a][perms[b][k]]);
            assert_eq!(mul[a * n + b], index(ab), "{a}*{b}");
        }
    }
}

#[test]
fn d4_is_the_dihedral_product() {
    let (n, mul) = table("group", "D4", "mul");
    assert_eq!(n, 8);
    for a in 0..8 {
        for b in 0..8 {
            let (i, s) = (a % 4, a / 4);
            let (j, t) = (b % 4, b / 4);
            let rot = if s == 0 { (i + j) % 4 } else { (i + 4 - j) % 4 };
            assert_eq!(mul[a * n + b], rot + 4 * ((s + t) % 2), "{a}*{b}");
        }
    }
}

#[test]
fn rings_are_modular_arithmetic() {
    for (name, m) in [("Z4", 4), ("Z6", 6)] {
        let (_, add) = table("ring", name, "add");
        let (_, mul) = table("ring", name, "mul");
        for a in 0..m {
            for b in 0..m {
                assert_eq!(add[a * m + b], (a + b) % m);
                assert_eq!(mul[a * m + b], (a * b) % m);
            }
        }
    }
}

/// Fills normalized Latin squares cell by cell in row-major order, trying
/// values in ascending order, and returns the first nonassociative one.
fn first_nonassociative_loop(n: usize) -> Option<Vec<usize>> {
    fn fill(n: usize, sq: &mut Vec<usize>, cell: usize) -> bool {
        if cell == n * n {
            let m = |a: usize, b: usize| sq[a * n + b];
            return (0..n).any(|a| (0..n).any(|b| (0..n).any(|c| m(m(a, b), c) != m(a, m(b, c)))));
        }
        let (r, c) = (cell / n, cell % n);
        if r == 0 || c == 0 {
            sq[cell] = r + c;
            return fill(n, sq, cell + 1);
        }
        for v in 0..n {
            let clash = (0..c).any(|k| sq[r * n + k] == v) || (0..r).any(|k| sq[k * n + c] == v);
            if !clash {
                sq[cell] = v;
                if fill(n, sq, cell + 1) {
                    return true;
                }
            }
        }
        false
    }
    let mut sq = vec![0; n * n];
    fill(n, &mut sq, 0).then_some(sq)
}

#[test]
fn l5_is_the_first_nonassociative_loop() {
    let (n, mul) = table("loop", "L5", "mul");
    assert_eq!(Some(mul), first_nonassociative_loop(n));
}
