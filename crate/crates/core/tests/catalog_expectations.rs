use curvlab_core::catalog::{build, Params, NAMES};

#[test]
fn default_points_meet_expectations() {
    let mut failures = Vec::new();
    for name in NAMES {
        let e = build(name, &Params::new()).unwrap_or_else(|err| panic!("{name}: {err}"));
        let ids = e.expected_ids();
        for x in &e.default_points {
            let a = e.analyze(x, &ids).unwrap_or_else(|err| panic!("{name} at {x:?}: {err}"));
            for o in e.check(&a) {
                if o.skipped {
                    continue;
                }
                let tag = if o.pass { "ok  " } else { "FAIL" };
                println!("{tag} {name} {x:?} {}: {} [{}]", o.label, o.detail, o.degenerate);
                if !o.pass {
                    failures.push(format!("{name} {x:?} {}: {}", o.label, o.detail));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{} failures:\n{}", failures.len(), failures.join("\n"));
}
