use std::time::Instant;
use thetatilt_core::qring::*;

fn main() {
    // Typical hat-entry op: big binomial-product numerator against a small denominator.
    let big = quantum_binomial(26, 13, 1); // ~170 terms
    let f_num = quantum_binomial(7, 3, 1);
    let f_den = quantum_integer(4, 1);
    let a = RingFrac::from_poly(big.clone());
    let b = RingFrac::new(f_num.clone(), f_den.clone());
    let t = Instant::now();
    let mut acc = RingFrac::zero();
    for _ in 0..1000 {
        acc = &acc + &(&a * &b);
    }
    println!("1000 fused mul-add big×smallfrac: {:?} ({:?})", t.elapsed(), acc.num().num_terms());
    let t = Instant::now();
    for _ in 0..1000 {
        let _ = poly_gcd(&big, &f_den);
    }
    println!("1000 gcd(big, small): {:?}", t.elapsed());
    let big2 = &big * &quantum_binomial(20, 10, 1);
    let t = Instant::now();
    for _ in 0..100 {
        let _ = poly_gcd(&big2, &big);
    }
    println!("100 gcd(bigger, big): {:?}", t.elapsed());
    let t = Instant::now();
    for _ in 0..1000 {
        let _ = &big * &f_num;
    }
    println!("1000 mul big×small: {:?}", t.elapsed());
}
