#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random connected-or-not diagram in the text format: 2 to 5 objects, a
/// few spaces of dimension 1 to 4, each object with 1 to 4 legs and some of
/// those legs joined. Every file parses.
pub fn random_diagram_text(rng: &mut ChaCha8Rng) -> String {
    let n_spaces = rng.random_range(1..=3);
    let dims: Vec<usize> = (0..n_spaces).map(|_| rng.random_range(1..=4)).collect();
    let n_obj = rng.random_range(2..=5);
    // legs[o] = (space, open?)
    let mut legs: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n_obj];
    let mut edges = Vec::new();
    let n_edges = rng.random_range(1..=5);
    for _ in 0..n_edges {
        let s = rng.random_range(0..n_spaces);
        let (o1, o2) = (rng.random_range(0..n_obj), rng.random_range(0..n_obj));
        let l1 = legs[o1].len();
        legs[o1].push((s, true));
        let l2 = legs[o2].len();
        legs[o2].push((s, false));
        edges.push(((o1, l1), (o2, l2)));
    }
    for l in legs.iter_mut() {
        if l.is_empty() || rng.random_bool(0.3) {
            l.push((rng.random_range(0..n_spaces), rng.random_bool(0.5)));
        }
    }
    // shuffle each object's legs and remap the edges
    let mut perms = Vec::new();
    for l in legs.iter_mut() {
        let mut p: Vec<usize> = (0..l.len()).collect();
        for i in (1..p.len()).rev() {
            p.swap(i, rng.random_range(0..=i));
        }
        let old = l.clone();
        for (new_pos, &src) in p.iter().enumerate() {
            l[new_pos] = old[src];
        }
        let mut inv = vec![0; p.len()];
        for (new_pos, &src) in p.iter().enumerate() {
            inv[src] = new_pos;
        }
        perms.push(inv);
    }
    let mut text = String::new();
    for (k, d) in dims.iter().enumerate() {
        text.push_str(&format!("space s{k} {d}\n"));
    }
    for (o, l) in legs.iter().enumerate() {
        let size: usize = l.iter().map(|(s, _)| dims[*s]).product();
        text.push_str(&format!("obj t{o}"));
        for (s, open) in l {
            text.push_str(&format!(" s{s}{}", if *open { '+' } else { '-' }));
        }
        text.push_str(" =");
        for _ in 0..size {
            let (re, im): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            text.push_str(&format!(" ({re},{im})"));
        }
        text.push('\n');
    }
    for ((o1, l1), (o2, l2)) in edges {
        let (a, b) = (perms[o1][l1] + 1, perms[o2][l2] + 1);
        if rng.random_bool(0.5) {
            text.push_str(&format!("edge t{o1}.{a} t{o2}.{b}\n"));
        } else {
            text.push_str(&format!("edge t{o2}.{b} t{o1}.{a}\n"));
        }
    }
    text
}
