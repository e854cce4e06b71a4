//! Compares the rank of the constructed relations with the rank found by
//! lattice search, for composite moduli up to 40.

use cyclolog::arith::is_composite;
use cyclolog::intrel::relation_lattice_rank;
use cyclolog::relations::enumerate_relations;

fn main() {
    for q in (4..=40u64).filter(|&q| is_composite(q)) {
        let s = enumerate_relations(q).unwrap();
        let r = relation_lattice_rank(q, 1_000_000, 256).unwrap();
        println!("q={q:2} slots={:2} constructed_rank={:2} search_rank={:2}", s.basis.len(), s.rank, r.rank);
    }
}
