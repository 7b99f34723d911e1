use gkcat_py::{run_cli, Model, Pres};

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn presentation_methods() {
    let p = Pres::from_file(&fixture("p1.gk")).unwrap();
    assert!(p.is_valid());
    assert!(p.objects().contains(&"AB".to_string()));
    assert_eq!(
        p.product("pA;f + pB;s", "theta(S1)").unwrap(),
        "pA;f;theta(S1) + pB;s;theta(S1)"
    );
    assert_eq!(p.add("f", "-f").unwrap(), "0(A,D)");
    assert_eq!(p.canonical("pA;f;g_s + pA;f2").unwrap(), "pA;f2 + pA;f;g_s");
    let p3 = Pres::from_file(&fixture("p3.gk")).unwrap();
    assert_eq!(p3.normalize("theta(S1)").unwrap(), "u;theta(S1');id(AB)");
    let (nf, trace) = p3.normalize_traced("theta(S1);pB").unwrap();
    assert!(p3.is_normal(&nf).unwrap());
    assert!(p3.check_trace(&trace).unwrap() > 0);
    assert!(!Pres::from_file(&fixture("broken.gk")).unwrap().is_valid());
}

#[test]
fn model_methods() {
    let p = Pres::from_file(&fixture("p1.gk")).unwrap();
    let m = Model::from_file(&p, &fixture("m1.json")).unwrap();
    assert!(m.validate().unwrap().is_empty());
    assert_eq!(m.eval("theta(S1)").unwrap(), vec![vec![1, 0], vec![0, 1]]);
    let (code, text) = run_cli(vec!["validate".into(), fixture("p1.gk")]);
    assert_eq!((code, text.as_str()), (0, "valid\n"));
}
