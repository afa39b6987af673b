use super::*;

fn parse_ok(text: &str) -> Document {
    parse(text).unwrap_or_else(|d| panic!("{}", d.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")))
}

fn errors(text: &str) -> Vec<Diagnostic> {
    parse(text).expect_err("should not parse")
}

#[test]
fn coframe_entry_is_a_coordinate_combination() {
    let doc = parse_ok("coordinates 3\ncoframe { phi1 = dz1; phi2 = dz2; phi3 = dz3 - z1*dz2 }\n");
    let ItemKind::Coframe { stem, entries } = &doc.items[1].kind else { panic!("{:?}", doc.items[1]) };
    assert_eq!(stem, "phi");
    assert_eq!(entries.len(), 3);
    assert_eq!(print_expr(&entries[2].1), "dz3 - z1*dz2");
}

#[test]
fn undeclared_function_gets_a_spanned_diagnostic() {
    let d = errors("coordinates 3\nparam t real\ndeform { sigma[3][1] = t * f(x2,y2) }\n");
    assert_eq!(d.len(), 1);
    assert!(d[0].message.contains("unknown function symbol"), "{}", d[0]);
    assert_eq!((d[0].span.line, d[0].span.col), (3, 28));
    assert!(d[0].hint.as_deref().unwrap().contains("fn f("));
}

#[test]
fn declared_function_is_accepted() {
    parse_ok("coordinates 3\nparam t real\nfn f(x2, y2) real\ndeform { sigma[3][1] = t * f(x2,y2) }\n");
}

#[test]
fn duplicates_point_at_the_first_declaration() {
    let d = errors("param t real\nparam t real\n");
    assert_eq!(d[0].span.line, 2);
    assert!(d[0].hint.as_deref().unwrap().contains("1:1"));
    let d = errors("param t complex tbar\nfn tbar(x1) real\n");
    assert!(d[0].message.contains("`tbar` is already declared"));
    assert!(parse("claim a: d2() trivial \"x\"\nclaim a: d2() trivial \"y\"\n").is_err());
}

#[test]
fn forward_references_are_rejected() {
    let d = errors("coordinates 1\nform a = b\nform b = dz1\n");
    assert!(d[0].message.contains("used before its declaration"));
    let d = errors("coordinates 1\nform a = a^dz1\n");
    assert_eq!(d.len(), 1);
}

#[test]
fn every_syntax_error_has_a_span() {
    for bad in [
        "coordinates",
        "param t imaginary",
        "form = dz1",
        "coframe { phi1 = dz1 +  }",
        "claim c: d2()",
        "claim c: d2() maybe \"x\"",
        "acs { K dx1 = dy1 }",
        "deform { sigma[1] = t }",
        "frobnicate 3",
        "form a = (dz1",
        "form a = \"unterminated",
        "form a = dz1 $ dz2",
    ] {
        let d = errors(bad);
        assert!(!d.is_empty(), "{bad}");
        assert!(d.iter().all(|x| x.span.line >= 1 && x.span.col >= 1), "{bad}: {d:?}");
    }
}

#[test]
fn errors_on_several_lines_are_all_reported() {
    let d = errors("param 1\nparam t real\nfrobnicate\n");
    assert_eq!(d.iter().map(|x| x.span.line).collect::<Vec<_>>(), vec![1, 3]);
}

#[test]
fn empty_document_parses() {
    assert_eq!(parse("").unwrap(), Document::default());
    assert_eq!(parse("\n\n").unwrap(), Document::default());
}

#[test]
fn precedence_and_associativity() {
    let cases = [
        ("a - b - c", "a - b - c"),
        ("a - (b - c)", "a - (b - c)"),
        ("(a + b)*c", "(a + b)*c"),
        ("a + b*c", "a + b*c"),
        ("a + (b + c)", "a + (b + c)"),
        ("-a^b", "-a^b"),
        ("(-a)^b", "(-a)^b"),
        ("-(a + b)", "-(a + b)"),
        ("a/(b*c)", "a/(b*c)"),
        ("(a/b)*c", "a/b*c"),
        ("a*-b", "a*-b"),
        ("((a))", "a"),
        ("d(f)^g", "d(f)^g"),
        ("x^2", "x^2"),
    ];
    for (src, want) in cases {
        let e = parse_expr(src).unwrap();
        assert_eq!(print_expr(&e), want, "{src}");
        assert_eq!(parse_expr(want).unwrap(), e, "{src}");
    }
    let Ast::Bin(Op::Sub, l, _) = parse_expr("a - b - c").unwrap() else { panic!() };
    assert!(matches!(*l, Ast::Bin(Op::Sub, ..)));
    assert!(parse_expr("a b").is_err());
    assert!(parse_expr("").is_err());
}

#[test]
fn blocks_accept_semicolons_and_newlines() {
    let a = parse_ok("coordinates 2\ncoframe { phi1 = dz1; phi2 = dz2 }\n");
    let b = parse_ok("coordinates 2\ncoframe {\n  phi1 = dz1\n\n  phi2 = dz2\n}\n");
    assert_eq!(a, b);
}

#[test]
fn comments_and_blank_runs_survive_printing() {
    let text = "# head\nspec x\n\n\n# note\nparam t real # trailing\ncoordinates 1\n";
    let doc = parse_ok(text);
    let printed = print(&doc);
    assert_eq!(printed, "# head\nspec x\n\n# note\nparam t real\ncoordinates 1\n");
    assert_eq!(parse_ok(&printed), doc);
}

#[test]
fn claims_parse_with_substitutions() {
    let doc = parse_ok("param t real\nclaim k: almost_pkahler(Omega) where t := 1/2, s := -1 stated \"text\"\n");
    let c = doc.claims().next().unwrap();
    assert_eq!(c.kind, "almost_pkahler");
    assert_eq!(c.subs.len(), 2);
    assert_eq!(c.provenance, Provenance::Stated("text".into()));
    assert_eq!(print(&doc).lines().nth(1).unwrap(), "claim k: almost_pkahler(Omega) where t := 1/2, s := -1 stated \"text\"");
}

#[test]
fn loader_reports_geometry_errors() {
    let bad_j = "coordinates 1\nacs {\n  J dx1 = dx1\n  J dy1 = dy1\n}\n";
    let d = load(&parse_ok(bad_j)).unwrap_err();
    assert!(d[0].hint.as_deref().unwrap_or("").contains("square"), "{}", d[0]);
    let jacobi = "algebra e 3 dual E {\n  [E1, E2] = E3\n  [E2, E3] = E3\n  [E1, E3] = E1\n}\n";
    assert!(load(&parse_ok(jacobi)).is_err());
    let two = "coordinates 1\ncoordinates 2\n";
    assert!(load(&parse_ok(two)).is_err());
    let unknown = "coordinates 1\nform a = dw1\n";
    let d = load(&parse_ok(unknown)).unwrap_err();
    assert!(d[0].message.contains("dw1"), "{}", d[0]);
}

#[test]
fn forms_evaluate_with_powers_and_wedges() {
    let spec = load(&parse_ok("coordinates 2\nform w = i/2*(dz1^dzbar1 + dz2^dzbar2)\nform v = w^2\nform u = w^w\n")).unwrap();
    assert_eq!(spec.form("v"), spec.form("u"));
    assert!(!spec.form("v").unwrap().is_zero());
    let bad = load(&parse_ok("coordinates 2\nform w = dz1*dz2\n")).unwrap_err();
    assert!(bad[0].hint.as_deref().unwrap_or("").contains('^'));
}

#[test]
fn substitution_replaces_functions_and_parameters() {
    let text = "coordinates 3\nparam t real\nfn u(x2, y2) real\nform a = t*u*dz1\n";
    let doc = parse_ok(text);
    let sub = vec![("u".to_string(), parse_expr("x2").unwrap()), ("t".to_string(), parse_expr("3").unwrap())];
    let spec = load_with(&doc, &sub).unwrap();
    let want = load(&parse_ok("coordinates 3\nform a = 3*x2*dz1\n")).unwrap();
    assert_eq!(spec.form("a"), want.form("a"));
    assert!(load_with(&doc, &vec![("nope".to_string(), parse_expr("1").unwrap())]).is_err());
}
