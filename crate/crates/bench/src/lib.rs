//! Fixtures shared by the criterion benches.

use tolrep::{corpus, Algebra, BinRel};

/// An algebra with the tolerance named `theta`.
pub fn fixture(name: &str) -> (Algebra, BinRel) {
    let entry = corpus::get(name).expect("corpus entry");
    let theta = entry.relation("theta").expect("entry carries theta").clone();
    (entry.algebra, theta)
}
