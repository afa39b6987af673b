//! Load a description from text, run its claims, and print the JSON report.

use pklab::catalog::{run_claims, ManifoldSpec};

const SOURCE: &str = "\
# a nilpotent structure with a closed 2-form
spec example
compact true

structure phi 2 {
  dphi2 = phi1^phibar1
}

form omega = i/2*(phi1^phibar1 + phi2^phibar2)
form sigma = phi1^phibar1

claim d2: d2() trivial \"d squares to zero\"
claim closed: closed(sigma) derived \"sigma is closed\"
claim notkahler: not_kahler(omega) derived \"omega is not closed\"
";

fn main() {
    let spec = match ManifoldSpec::from_text(SOURCE) {
        Ok(s) => s,
        Err(diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            std::process::exit(2);
        }
    };
    let report = run_claims(&spec);
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    // diagnostics carry line and column
    if let Err(d) = ManifoldSpec::from_text("coordinates 2\nform a = h*dz1\n") {
        println!("{}", d[0]);
    }
}
