//! Classifying matrices: every family and variant they belong to.
//!
//! With a path argument the matrix is read from a JSON document
//! (as written by `kmln gen`); otherwise a few built-in ones are used.

use kmln::algebra::assemble;
use kmln::classify::{classify, ClassReport};
use kmln::document::MatrixDocument;
use kmln::families::{construct, Const, FamilyConstants, FamilyTag};
use kmln::types::{CVec4, Mat4};

fn show(name: &str, r: &ClassReport) {
    println!("{name}: rank {}, real {}", r.rank, r.real_matrix);
    for m in &r.families {
        let consts: Vec<String> = m.recovered.iter().map(|(c, v)| format!("{c}={v:.4}")).collect();
        println!("  {:<6} residual {:.1e} {}", m.tag.name(), m.residual, consts.join(" "));
    }
    if !r.variants.is_empty() {
        let v: Vec<String> = r.variants.iter().map(|v| v.to_string()).collect();
        println!("  variants: {}", v.join(" "));
    }
}

fn main() {
    if let Some(path) = std::env::args().nth(1) {
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = MatrixDocument::from_json(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
        show(&path, &classify(&doc.matrix(), 1e-9));
        return;
    }

    show("identity", &classify(&Mat4::identity(), 1e-9));

    let consts = FamilyConstants::new().with(Const::A, 1.0).with(Const::D, 2.0);
    let p = construct(FamilyTag::K5, &consts, &[CVec4::real(0.2, 0.7, 0.0, -0.4)]).unwrap();
    show("K-5 member", &classify(&assemble(&p), 1e-9));
}
