use std::collections::BTreeSet;
use std::path::PathBuf;

use pachner::invariants::{homology, HomologyGroup};
use pachner::isosig::encode;
use pachner::{FVector, FacetList};

fn k3_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/k3").join(name)
}

// face counts straight from the vertex sets
fn simplicial_f_vector(facets: &[[usize; 5]]) -> FVector {
    let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); 5];
    for f in facets {
        let mut f = f.to_vec();
        f.sort_unstable();
        for mask in 1u32..32 {
            let face: Vec<usize> = (0..5).filter(|i| mask & (1 << i) != 0).map(|i| f[i]).collect();
            sets[face.len() - 1].insert(face);
        }
    }
    FVector(std::array::from_fn(|k| sets[k].len() as u64))
}

#[test]
fn k3_16_ingests_as_k3() {
    let path = k3_path("K3_16.txt");
    let Ok(text) = std::fs::read_to_string(&path) else {
        eprintln!("skipping: {} not present (run scripts/fetch_k3.sh)", path.display());
        return;
    };
    let fl = FacetList::parse(&text, false).unwrap();
    let t = fl.to_triangulation().unwrap();
    let fv = t.f_vector().unwrap();
    assert_eq!(fv, simplicial_f_vector(fl.facets()));
    assert_eq!(fv.f0(), fl.vertex_count() as u64);
    assert_eq!(fv.euler_characteristic(), 24);
    let report = t.validity();
    assert!(report.is_valid(), "{report}");
    assert!(t.is_orientable().unwrap());
    let h = homology(&t).unwrap();
    assert_eq!(h, vec![
        HomologyGroup::free(1),
        HomologyGroup::free(0),
        HomologyGroup::free(22),
        HomologyGroup::free(0),
        HomologyGroup::free(1),
    ]);
    let start = std::time::Instant::now();
    let sig = encode(&t).unwrap();
    eprintln!("signature length {} in {:?}", sig.as_str().len(), start.elapsed());
}
