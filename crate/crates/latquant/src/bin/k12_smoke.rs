use latquant::exact::Rational;
use latquant::lattice::{catalog, relevant_vectors};
use latquant::symmetry::{discover_laminated_symmetry, to_permutation_group, MatrixGroup};
use num_bigint::BigInt;
use std::time::Instant;

fn main() {
    let a = Rational::new(BigInt::from(34), BigInt::from(33));
    let t0 = Instant::now();
    let lam = catalog::laminated_k12(&a).unwrap();
    let rv = relevant_vectors(&lam);
    println!("laminated K12 relevant vectors: {} ({:?})", rv.len(), t0.elapsed());

    let t1 = Instant::now();
    let stored = MatrixGroup::new(lam.symmetry_generators.clone()).unwrap();
    let pg = to_permutation_group(&stored, &rv).unwrap();
    println!("stored group order: {} ({:?})", pg.order(), t1.elapsed());

    let t2 = Instant::now();
    let base = MatrixGroup::new(catalog::k12().symmetry_generators.clone()).unwrap();
    let disc = discover_laminated_symmetry(&base, &lam, &rv).unwrap();
    println!("discovered {} generators ({:?})", disc.generators.len(), t2.elapsed());
    let t3 = Instant::now();
    let pg2 = to_permutation_group(&disc, &rv).unwrap();
    println!("discovered group order: {} ({:?})", pg2.order(), t3.elapsed());
    // stored generators must lie in the discovered group and vice versa
    let all_in = stored.generators.iter().all(|m| pg2.contains_matrix(m))
        && disc.generators.iter().all(|m| pg.contains_matrix(m));
    println!("groups equal: {}", all_in && pg.order() == pg2.order());
}
