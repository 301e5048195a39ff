use propcalc_py::{bracket, init_module, run_suites_json, standard_mc_element};
use pyo3::ffi::c_str;
use pyo3::prelude::*;

#[test]
fn standard_element_solves_the_mc_equation() {
    let c = propcalc::coproperad::Coproperad::parse(propcalc::cli::SHIPPED[1].1).unwrap();
    let x = standard_mc_element(&c, 2, 2, 7);
    assert!(!x.is_empty());
    let k = propcalc::convolution::build_k(&c, &propcalc::cli::standard_complex(2), &propcalc::cli::standard_complex(2));
    let l1 = bracket(&k, &[(x.clone(), 0)]).unwrap();
    let l2 = bracket(&k, &[(x.clone(), 0), (x, 0)]).unwrap();
    assert!(l1.len() + l2.len() > 0);
}

#[test]
fn report_json_is_parseable() {
    let json = run_suites_json(vec!["cobar-d2".into()], 2, 2, 2, 2, 1, false).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn module_works_from_python() {
    pyo3::append_to_inittab!(init_module);
    Python::initialize();
    Python::attach(|py| {
        let code = c_str!(
            r#"
import propcalc_py as pc
c = pc.Coproperad.shipped("binary_w2")
assert c.dim == 3 and c.audit() == []
assert all(c.cobar_d2().values())
k = pc.LAlgebra.k(c, 2, 2)
x = pc.standard_mc_element(c, 2, 2, 7)
assert k.mc_residual(x) == {}
t = k.twisted(x)
assert t.mc_residual({}) == {}
e = {i: "1" for i in range(k.dim) if k.degree(i) == 0}
assert k.jacobi_residual([(e, 0), (e, 0)]) == {}
result = len(pc.shipped_fixtures())
"#
        );
        let globals = pyo3::types::PyDict::new(py);
        py.run(code, Some(&globals), None).unwrap();
        let n: usize = globals.get_item("result").unwrap().unwrap().extract().unwrap();
        assert_eq!(n, 6);
    });
}
