//! The JSON document format used by the command line.

use kmln::document::{Meta, MatrixDocument};
use kmln::families::{construct, Const, FamilyConstants, FamilyTag};
use kmln::types::CVec4;

fn main() {
    let consts = FamilyConstants::new().with(Const::B, -1.5);
    let base = [CVec4::real(1.0, 0.0, 0.0, 0.0), CVec4::real(0.0, 0.5, 0.0, 0.5)];
    let p = construct(FamilyTag::KM3, &consts, &base).unwrap();

    let doc = MatrixDocument::from_params(p).with_meta(Meta {
        tag: "KM-3".into(),
        constants: consts,
        seed: None,
    });
    let text = doc.to_json();
    println!("{text}");

    let back = MatrixDocument::from_json(&text).unwrap();
    println!("lossless: {}", back == doc);

    match MatrixDocument::from_json(&text.replace("-1.5", "-1.25")) {
        Ok(_) => println!("tampered document accepted?"),
        Err(e) => println!("tampered document rejected: {e}"),
    }
}
