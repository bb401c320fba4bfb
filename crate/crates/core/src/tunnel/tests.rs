use super::*;
use crate::text::build_graph_from_text;
use crate::wheeler::{validate_wheeler, NodeRange, WheelerGraph};

fn abcabc() -> WheelerGraph {
    build_graph_from_text(b"abcabc")
}

fn abcabc_block() -> Block {
    Block::new(vec![vec![2, 3], vec![4, 5]]).unwrap()
}

fn code(g: &WheelerGraph, b: u8) -> u8 {
    g.alphabet().code(b).unwrap()
}

#[test]
fn check_block_examples() {
    let g = abcabc();
    assert_eq!(check_block(&g, &abcabc_block()), Ok(()));
    for v in 1..=g.n() {
        assert_eq!(check_block(&g, &Block::new(vec![vec![v]]).unwrap()), Ok(()));
    }
    let ragged = Block::new(vec![vec![2, 3], vec![4]]);
    assert_eq!(ragged, Err(BlockViolation::Shape));
    // {5,6} has in-labels b and c.
    let err = check_block(&g, &Block::new(vec![vec![5, 6]]).unwrap()).unwrap_err();
    assert_eq!(err.condition(), "iii");
    let err = check_block(&g, &Block::new(vec![vec![2, 4]]).unwrap()).unwrap_err();
    assert_eq!(err.condition(), "i");
}

#[test]
fn check_string_block_examples() {
    let g = abcabc();
    let sb = StringBlock::new(2, 2, 2);
    assert_eq!(check_string_block(&g, &sb), Ok(()));
    assert_eq!(sb.to_block(&g).unwrap(), abcabc_block());
    assert_eq!(check_block(&g, &sb.to_block(&g).unwrap()), Ok(()));
    for s in 1..=3 {
        assert_eq!(check_string_block(&g, &StringBlock::new(2, 1, s)), Ok(()));
    }
    let err = check_string_block(&g, &StringBlock::new(3, 2, 1)).unwrap_err();
    assert_eq!(err.condition(), "iii");
    // Running off the end of the text.
    assert!(check_string_block(&g, &StringBlock::new(2, 2, 3)).is_err());
}

#[test]
fn tunnel_abcabc() {
    let g = abcabc();
    let tg = tunnel_graph(&g, &[abcabc_block()]).unwrap();
    let gt = tg.graph();
    assert_eq!((gt.n(), gt.m()), (5, 5));
    assert_eq!(gt.l_string(), b"abcca");
    assert!(tg.is_entrance(2) && !tg.is_inner(2));
    assert!(tg.is_inner(3) && !tg.is_entrance(3));
    assert_eq!(validate_wheeler(&gt.decode()), Ok(()));
    assert_eq!(tg.tunnels(), &[Tunnel { entrance: 2, exit: 3, width: 2, length: 2, sourceless_roots: 0 }]);
    assert_eq!(tg.original_n(), 7);
    assert_eq!((tg.width(2), tg.width(3), tg.width(1)), (2, 2, 1));

    // Manual tunneling: v1 -a-> x1 -b-> x2 -c-> {v4, v7}, v4 -a-> x1.
    let manual = crate::wheeler::EdgeList::new(
        5,
        vec![
            crate::wheeler::Edge::new(1, 2, b'a'),
            crate::wheeler::Edge::new(4, 2, b'a'),
            crate::wheeler::Edge::new(2, 3, b'b'),
            crate::wheeler::Edge::new(3, 4, b'c'),
            crate::wheeler::Edge::new(3, 5, b'c'),
        ],
    );
    assert_eq!(gt, &WheelerGraph::encode(&manual).unwrap());
}

#[test]
fn empty_block_list_is_identity() {
    let g = abcabc();
    let tg = tunnel_graph(&g, &[]).unwrap();
    assert_eq!(tg.graph(), &g);
    assert_eq!(tg.i_prime().count_ones(), g.m());
    assert_eq!(tg.o_prime().count_ones(), g.m());
    assert!(tg.tunnels().is_empty());
}

#[test]
fn width_one_blocks_are_identity() {
    let g = abcabc();
    let tg = tunnel_graph(&g, &[Block::new(vec![vec![2], vec![4]]).unwrap()]).unwrap();
    assert_eq!(tg.graph(), &g);
}

#[test]
fn overlapping_and_invalid_blocks_rejected() {
    let g = abcabc();
    let b = abcabc_block();
    assert!(matches!(tunnel_graph(&g, &[b.clone(), b]), Err(TunnelError::Overlap { .. })));
    let bad = Block::new(vec![vec![5, 6]]).unwrap();
    assert!(matches!(tunnel_graph(&g, &[bad]), Err(TunnelError::InvalidBlock { index: 0, .. })));
}

#[test]
fn offsets_and_exits() {
    let g = abcabc();
    let tg = tunnel_graph(&g, &[abcabc_block()]).unwrap();
    let gt = tg.graph();
    let (a, b, c) = (code(&g, b'a'), code(&g, b'b'), code(&g, b'c'));

    // Original ranks: v1=1 v2=2 v5=3 v3=4 v6=5 v4=6 v7=7.
    assert_eq!(tg.phi(2), Some(TraversalPos::new(2, 1)));
    assert_eq!(tg.phi(3), Some(TraversalPos::new(2, 2)));
    assert_eq!(tg.phi(5), Some(TraversalPos::new(3, 2)));
    let v4 = tg.phi(6).unwrap();
    let v7 = tg.phi(7).unwrap();
    assert_eq!((v4, v7), (TraversalPos::new(4, 1), TraversalPos::new(5, 1)));

    let from_v1 = gt.out_edge_rank(1, a, 1).unwrap();
    assert_eq!(tg.enter_offset(from_v1, 2), 1);
    let from_v4 = gt.out_edge_rank(4, a, 1).unwrap();
    assert_eq!(tg.enter_offset(from_v4, 2), 2);

    let j1 = gt.edge_range_for_label(NodeRange::new(3, 3), c).first;
    assert_eq!(gt.target(tg.exit_edge(j1, 1, 1, false).unwrap()), v4.node);
    assert_eq!(gt.target(tg.exit_edge(j1, 2, 1, false).unwrap()), v7.node);
    assert!(tg.exit_edge(j1, 3, 1, false).is_err());
    assert!(tg.exit_edge(j1, 1, 2, false).is_err());

    assert_eq!(tg.step(TraversalPos::new(1, 1), a, 1), Ok(TraversalPos::new(2, 1)));
    assert_eq!(tg.step(TraversalPos::new(2, 2), b, 1), Ok(TraversalPos::new(3, 2)));
    assert_eq!(tg.step(TraversalPos::new(3, 2), c, 1), Ok(v7));
    assert_eq!(tg.step(TraversalPos::new(3, 1), c, 1), Ok(v4));
    assert_eq!(tg.step(v4, a, 1), Ok(TraversalPos::new(2, 2)));
    assert!(tg.step(TraversalPos::new(2, 1), c, 1).is_err());
}

#[test]
fn range_search() {
    let g = abcabc();
    let tg = tunnel_graph(&g, &[abcabc_block()]).unwrap();
    let (a, b) = (code(&g, b'a'), code(&g, b'b'));
    assert_eq!(tg.follow_node_range(NodeRange::new(1, 5), a), NodeRange::new(2, 2));
    assert_eq!(tg.follow_node_range(NodeRange::new(2, 2), b), NodeRange::new(3, 3));
    assert_eq!(tg.follow_node_range(NodeRange::EMPTY, a), NodeRange::EMPTY);
    assert!(!tg.path_search(b"bca").is_empty());
    assert_eq!(tg.path_search(b""), NodeRange::new(1, 5));
    assert!(tg.path_search(b"cc").is_empty());
    assert!(tg.path_search(b"abcabca").is_empty());
    assert!(!tg.path_search(b"abcabc").is_empty());
    assert!(tg.path_search(b"z").is_empty());
}

#[test]
fn find_blocks_small_texts() {
    let g = abcabc();
    assert_eq!(find_string_blocks(&g, 2, 2), vec![StringBlock::new(2, 2, 2)]);
    assert!(find_string_blocks(&build_graph_from_text(b"abc"), 2, 2).is_empty());
    assert!(find_string_blocks(&build_graph_from_text(b""), 2, 2).is_empty());
}

#[test]
fn brute_force_agrees_on_abcabc() {
    let g = abcabc();
    let all = enumerate_blocks_bruteforce(&g, 64).unwrap();
    let wide: Vec<&Block> = all.iter().filter(|b| b.width() >= 2).collect();
    // Growing {v2,v5} by a third column would add v4 -a-> v5, an edge into
    // another copy, so two overlapping maximal blocks remain.
    let tail = Block::new(vec![vec![4, 5], vec![6, 7]]).unwrap();
    assert_eq!(wide, vec![&abcabc_block(), &tail]);
    assert!(enumerate_blocks_bruteforce(&g, 3).is_err());
}

#[test]
fn distinct_labels_give_only_narrow_blocks() {
    let g = build_graph_from_text(b"abcdefg");
    let all = enumerate_blocks_bruteforce(&g, 64).unwrap();
    assert!(!all.is_empty());
    assert!(all.iter().all(|b| b.width() == 1));
}

fn naive_contains(text: &[u8], p: &[u8]) -> bool {
    p.is_empty() || text.windows(p.len()).any(|w| w == p)
}

#[test]
fn tunneled_search_matches_text_on_periodic_inputs() {
    for k in 2..12 {
        let text = b"abc".repeat(k);
        let g = build_graph_from_text(&text);
        let blocks: Vec<Block> = find_string_blocks(&g, 2, 2).iter().map(|b| b.to_block(&g).unwrap()).collect();
        let tg = tunnel_graph(&g, &blocks).unwrap();
        assert!(tg.graph().n() < g.n());
        assert_eq!(validate_wheeler(&tg.graph().decode()), Ok(()));
        for len in 0..5 {
            for p in crate::tunnel::tests::words(b"abcd", len) {
                assert_eq!(!tg.path_search(&p).is_empty(), naive_contains(&text, &p), "{:?}", p);
            }
        }
    }
}

pub(crate) fn words(alphabet: &[u8], len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| alphabet.iter().map(move |&c| [w.clone(), vec![c]].concat()))
            .collect();
    }
    out
}
