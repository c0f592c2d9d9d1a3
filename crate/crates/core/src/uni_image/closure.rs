use std::collections::VecDeque;

use super::bitmap::Bitmap;
use crate::gf::FieldTable;
use crate::trimat::{Dense, KeySpace};

/// Subgroup of the group keyed by `space` generated by the marked elements.
///
/// The space must be closed under multiplication (a lower central term). Generators are
/// taken in key order and kept only when they enlarge the current subgroup; each new one
/// seeds a breadth-first search from `H g`, closing under right multiplication by every
/// kept generator.
pub fn subgroup_closure(space: &KeySpace, field: &FieldTable, generators: &Bitmap) -> Bitmap {
    let size = space.size();
    let mut members = Bitmap::new(size);
    members.set(0);
    let mut elements: Vec<u64> = vec![0];
    let mut kept: Vec<Dense> = Vec::new();
    for g in generators.iter_ones() {
        if members.get(g) {
            continue;
        }
        let gd = space.decode_dense(g);
        kept.push(gd);
        let mut queue = VecDeque::new();
        let existing = elements.len();
        for idx in 0..existing {
            let h = space.decode_dense(elements[idx]);
            let k = space.encode_dense(&h.mul(&gd, field));
            if members.insert(k) {
                elements.push(k);
                queue.push_back(k);
            }
        }
        while let Some(x) = queue.pop_front() {
            let xd = space.decode_dense(x);
            for s in &kept {
                let k = space.encode_dense(&xd.mul(s, field));
                if members.insert(k) {
                    elements.push(k);
                    queue.push_back(k);
                }
            }
        }
        if elements.len() as u64 == size {
            break;
        }
    }
    members
}
