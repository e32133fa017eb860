//! Exact maximum-weight matching, with and without the requirement to match
//! as many robots as possible, checked against exhaustive search.

use decmata::matching::{max_weight_max_cardinality_matching, max_weight_matching_bruteforce};
use decmata::{max_weight_matching, Bigraph, Edge};

fn main() -> decmata::Result<()> {
    let w = [[8.0, 6.0, 1.0], [6.0, 8.0, 1.0], [1.0, 1.0, 8.0]];
    let edges = (0..3).flat_map(|r| (0..3).map(move |t| Edge { robot: r + 1, node: t + 1, weight: w[r][t] })).collect();
    let g = Bigraph::new(vec![1, 2, 3], vec![1, 2, 3], edges)?;
    let m = max_weight_matching(&g);
    println!("3x3: {:?}, weight {}", m.pairs, m.total_weight);
    assert_eq!(m, max_weight_matching_bruteforce(&g)?);

    // Robot 2 only has a zero-weight alternative.
    let g = Bigraph::new(
        vec![1, 2],
        vec![1, 2],
        vec![
            Edge { robot: 1, node: 1, weight: 5.0 },
            Edge { robot: 2, node: 1, weight: 4.0 },
            Edge { robot: 2, node: 2, weight: 0.0 },
        ],
    )?;
    println!("max weight:                  {:?}", max_weight_matching(&g).pairs);
    println!("max cardinality, then weight: {:?}", max_weight_max_cardinality_matching(&g).pairs);
    Ok(())
}
