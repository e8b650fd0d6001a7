use colfin::lattice::classify_minimal_node;
use colfin::{FieldSpec, LatticeNode};
use colfin_bench::{periodic_strings, sandwich_elements, special_finitary, triangular_prefixes};

#[test]
fn fixtures_are_deterministic_and_well_formed() {
    for spec in [FieldSpec::rationals(), FieldSpec::prime(5).unwrap()] {
        let es = sandwich_elements(spec, 6, 8);
        assert_eq!(format!("{es:?}"), format!("{:?}", sandwich_elements(spec, 6, 8)));
        for e in &es {
            let node = classify_minimal_node(e).unwrap();
            assert!(node.le(LatticeNode::DscGLfr) && LatticeNode::SLfr.le(node));
        }
        assert!(special_finitary(spec, 4, 8).iter().all(|g| g.corner_det().is_one()));
        assert_eq!(periodic_strings(spec, 3, 4).len(), 4);
        assert!(triangular_prefixes(spec, 5, 4).iter().all(|u| u.spec() == spec));
    }
}
