//! An almost complex structure given by its action, its `(1,0)`-coframe, and
//! the Nijenhuis obstruction as `(0,2)`-parts of `dφ`.

use pklab::acs::AlmostComplexStructure;
use pklab::exterior::{Coframe, Form, Frame};
use pklab::symexpr::{Expr, FnSym};

fn main() -> pklab::Result<()> {
    let fr = Frame::real_coordinates(2);
    let x2 = fr.coord("x2").unwrap().clone();
    let g = Expr::func(&FnSym::real("g", &[x2]));
    let one = Expr::one();

    // J dx1 = g dx2 + dy1 and J dy1 = -dx1 - g dy2, standard on the rest
    let j = AlmostComplexStructure::from_vector_action(
        fr.basis(),
        &[
            ("dx1", vec![("dx2", g.clone()), ("dy1", one.clone())]),
            ("dx2", vec![("dy2", one.clone())]),
            ("dy1", vec![("dx1", -one.clone()), ("dy2", -g.clone())]),
            ("dy2", vec![("dx2", -one.clone())]),
        ],
    )?;
    j.check()?;

    let dx: Vec<Form> = ["dx1", "dx2"].iter().map(|n| Form::named(fr.basis(), n)).collect::<Result<_, _>>()?;
    let phi = j.coframe_from(&dx)?;
    for (k, p) in phi.iter().enumerate() {
        println!("Phi{} = {p}", k + 1);
    }
    println!("type (1,0): {}", j.is_type_10(&phi)?);

    let cf = Coframe::new(&phi, "Phi")?;
    for (k, p) in phi.iter().enumerate() {
        let part = cf.to_coframe(&fr.d(p)?)?.bidegree_part(0, 2)?;
        println!("(dPhi{})^(0,2) = {part}", k + 1);
    }
    Ok(())
}
