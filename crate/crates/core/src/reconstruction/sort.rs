//! Stable merge sort driven by a fallible "strictly less" predicate.
//!
//! Reconstruction sorts pairs by asking the oracle, so every comparison can
//! fail and is counted. The merge order is fixed, which makes the sequence
//! of queries (and thus the query count) a deterministic function of the
//! answers.

pub(crate) fn merge_sort_by<T: Clone, E>(
    items: &mut Vec<T>,
    mut less: impl FnMut(&T, &T) -> Result<bool, E>,
) -> Result<(), E> {
    let len = items.len();
    if len < 2 {
        return Ok(());
    }
    let mut src = std::mem::take(items);
    let mut dst = Vec::with_capacity(len);
    let mut width = 1;
    while width < len {
        dst.clear();
        let mut start = 0;
        while start < len {
            let mid = (start + width).min(len);
            let end = (start + 2 * width).min(len);
            let (mut i, mut j) = (start, mid);
            while i < mid && j < end {
                // Take from the right run only when strictly smaller: stability.
                if less(&src[j], &src[i])? {
                    dst.push(src[j].clone());
                    j += 1;
                } else {
                    dst.push(src[i].clone());
                    i += 1;
                }
            }
            dst.extend_from_slice(&src[i..mid]);
            dst.extend_from_slice(&src[j..end]);
            start = end;
        }
        std::mem::swap(&mut src, &mut dst);
        width *= 2;
    }
    *items = src;
    Ok(())
}
