#![allow(dead_code)]

use std::path::PathBuf;

use kmln::types::{Complex, Mat4};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn cli(args: &[&str], stdin: &str) -> Run {
    let mut input = stdin.as_bytes();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("kmln").chain(args.iter().copied());
    let code = kmln::cli::run(argv, &mut input, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Writes `text` to a scratch file and returns its path.
pub fn scratch(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compares `actual` with the golden file, rewriting it instead when
/// `KMLN_UPDATE_GOLDEN` is set.
pub fn golden_matches(name: &str, actual: &str) -> bool {
    let path = golden_dir().join(name);
    if std::env::var_os("KMLN_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return true;
    }
    std::fs::read_to_string(&path).is_ok_and(|expected| expected == actual)
}

/// Rank by Gaussian elimination with complete pivoting: pivots below
/// `tol` times the first pivot count as zero.
pub fn elimination_rank(g: &Mat4, tol: f64) -> usize {
    let mut a = g.0;
    let mut rank = 0;
    let mut first = 0.0;
    for step in 0..4 {
        let (mut pr, mut pc, mut best) = (step, step, 0.0);
        for r in step..4 {
            for c in step..4 {
                if a[r][c].norm() > best {
                    (pr, pc, best) = (r, c, a[r][c].norm());
                }
            }
        }
        if step == 0 {
            first = best;
        }
        if best == 0.0 || best <= tol * first {
            break;
        }
        a.swap(step, pr);
        for row in a.iter_mut() {
            row.swap(step, pc);
        }
        for r in step + 1..4 {
            let f = a[r][step] / a[step][step];
            for c in step..4 {
                let v = a[step][c];
                a[r][c] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Largest 2×2 minor relative to the squared largest entry; zero exactly
/// when the rank is at most one.
pub fn max_minor(g: &Mat4) -> f64 {
    let e = &g.0;
    let mut worst: f64 = 0.0;
    for r1 in 0..4 {
        for r2 in r1 + 1..4 {
            for c1 in 0..4 {
                for c2 in c1 + 1..4 {
                    let m: Complex = e[r1][c1] * e[r2][c2] - e[r1][c2] * e[r2][c1];
                    worst = worst.max(m.norm());
                }
            }
        }
    }
    let scale = g.max_abs();
    if scale == 0.0 {
        0.0
    } else {
        worst / (scale * scale)
    }
}
