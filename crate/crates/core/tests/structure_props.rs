use cubeset::structure::{closure, is_k_linked, k_components};
use cubeset::{build_hypercube, RegularBipartiteGraph, Vertex, VertexSet};
use proptest::prelude::*;

fn even_set(g: &RegularBipartiteGraph, mask: u64) -> VertexSet {
    let ids: Vec<Vertex> = g.class_x().iter().collect();
    g.set_of(
        ids.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v),
    )
}

fn dim_and_mask() -> impl Strategy<Value = (usize, u64)> {
    (2usize..=6).prop_flat_map(|d| (Just(d), 1u64..(1u64 << (1 << (d - 1)))))
}

proptest! {
    #[test]
    fn closure_is_idempotent_and_extensive((d, mask) in dim_and_mask()) {
        let g = build_hypercube(d).unwrap();
        let a = even_set(&g, mask);
        let c = closure(&g, &a).unwrap();
        prop_assert!(a.is_subset(&c));
        prop_assert_eq!(&closure(&g, &c).unwrap(), &c);
        prop_assert_eq!(g.neighborhood(&c), g.neighborhood(&a));
    }

    #[test]
    fn closure_of_two_linked_is_two_linked((d, mask) in dim_and_mask()) {
        let g = build_hypercube(d).unwrap();
        let a = even_set(&g, mask);
        if is_k_linked(&g, &a, 2).unwrap() {
            prop_assert!(is_k_linked(&g, &closure(&g, &a).unwrap(), 2).unwrap());
        }
    }

    #[test]
    fn neighborhoods_add_over_two_components((d, mask) in dim_and_mask()) {
        let g = build_hypercube(d).unwrap();
        let a = even_set(&g, mask);
        let parts = k_components(&g, &a, 2).unwrap().parts;
        let total: usize = parts.iter().map(|p| g.neighborhood(p).count()).sum();
        prop_assert_eq!(total, g.neighborhood(&a).count());
        let members: usize = parts.iter().map(VertexSet::count).sum();
        prop_assert_eq!(members, a.count());
    }

    /// A set within distance `l` of a k-linked set, point by point, is (k + 2l)-linked.
    #[test]
    fn nearby_sets_stay_linked(d in 3usize..=4, mask in 1u64..256, moves in prop::collection::vec((0usize..16, 0u32..16), 1..10)) {
        let g = build_hypercube(d).unwrap();
        let a = even_set(&g, mask & ((1u64 << (1 << (d - 1))) - 1));
        prop_assume!(!a.is_empty() && is_k_linked(&g, &a, 2).unwrap());
        let members: Vec<Vertex> = a.iter().collect();
        let l = 1usize;
        let t = g.set_of(moves.iter().map(|&(i, flip)| {
            let v = members[i % members.len()];
            // flip at most one coordinate: distance ≤ l = 1
            Vertex(v.0 ^ ((1 << (flip as usize % d)) * u32::from(flip < 8)))
        }));
        prop_assert!(is_k_linked(&g, &t, 2 + 2 * l).unwrap());
    }

    #[test]
    fn neighborhood_size_bounds((d, mask) in dim_and_mask()) {
        let g = build_hypercube(d).unwrap();
        let a = even_set(&g, mask);
        let n = g.neighborhood(&a);
        prop_assert!(n.count() <= d * a.count());
        let b = even_set(&g, mask | (mask >> 1));
        prop_assert!(n.is_subset(&g.neighborhood(&b)));
    }
}
