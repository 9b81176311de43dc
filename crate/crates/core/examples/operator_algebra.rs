//! Exact difference-differential operators with exponential-polynomial
//! coefficients: normal ordering, commutators, exponentials and conjugation.

use hurwitz_toda::opalg::{Coeff, DiffOp, ExpPolyFunc, Part, Window};
use hurwitz_toda::poly::rat;

type Op = DiffOp<ExpPolyFunc>;

fn main() -> hurwitz_toda::Result<()> {
    let w = Window::new(-6, 6, 2);
    let d = Op::d(w);
    let s = Op::mult(ExpPolyFunc::s(), w);
    let e = Op::shift_op(1, w);

    println!("[D, s]     = {}", d.commutator(&s));
    println!("[E, s]     = {}", e.commutator(&s));
    println!("E s        = {}", e.multiply(&s));
    println!("D e^(b s)  = {}", d.multiply(&Op::mult(ExpPolyFunc::exp_beta_s(1), w)));

    let lowering = Op::term(ExpPolyFunc::c(1).neg(), 0, -1, w);
    let x = lowering.exp_strict()?;
    println!("\nexp(-c1 E^-1) = {x}");
    let back = x.log_unitriangular()?;
    assert_eq!(back, lowering);
    let inv = x.inverse_unitriangular()?;
    println!("its inverse   = {inv}");

    let g = Op::mult(ExpPolyFunc::beta().mul(&ExpPolyFunc::s()).mul(&ExpPolyFunc::s()).scale(&rat(1, 2)), w);
    let conj = d.conjugate_by_exp(&g, 6);
    println!("\ne^g D e^-g = {}  (terminated: {})", conj.op, conj.terminated);
    let conj = e.conjugate_by_exp(&g, 6);
    println!("e^g E e^-g = {}  (terminated: {})", conj.op, conj.terminated);

    let l = e.add(&Op::mult(ExpPolyFunc::s(), w)).add(&Op::term(ExpPolyFunc::one(), 0, -1, w));
    println!("\nL = {l}");
    println!("L_+ = {}", l.project(Part::NonNegative));
    println!("L_- = {}", l.project(Part::Negative));
    Ok(())
}
