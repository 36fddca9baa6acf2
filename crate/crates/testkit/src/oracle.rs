use std::collections::BTreeSet;

/// Precision, recall, F1.
pub type Prf = (f64, f64, f64);

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn windows(tokens: &[String], n: usize) -> Vec<Vec<String>> {
    if tokens.len() < n {
        return Vec::new();
    }
    (0..=tokens.len() - n).map(|i| tokens[i..i + n].to_vec()).collect()
}

fn occurrences(grams: &[Vec<String>], g: &[String]) -> usize {
    grams.iter().filter(|x| x.as_slice() == g).count()
}

/// ROUGE-N by listing every n-gram and counting matches with clipping.
pub fn rouge_n(candidate: &[String], reference: &[String], n: usize) -> Prf {
    let cand = windows(candidate, n);
    let refs = windows(reference, n);
    let mut distinct: Vec<Vec<String>> = Vec::new();
    for g in &cand {
        if !distinct.contains(g) {
            distinct.push(g.clone());
        }
    }
    let matched: usize = distinct
        .iter()
        .map(|g| occurrences(&cand, g).min(occurrences(&refs, g)))
        .sum();
    let p = if cand.is_empty() { 0.0 } else { matched as f64 / cand.len() as f64 };
    let r = if refs.is_empty() { 0.0 } else { matched as f64 / refs.len() as f64 };
    (p, r, f1(p, r))
}

/// LCS length from the full (m+1)x(n+1) table.
pub fn lcs(a: &[String], b: &[String]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

pub fn rouge_l(candidate: &[String], reference: &[String]) -> Prf {
    let l = lcs(candidate, reference) as f64;
    let p = if candidate.is_empty() { 0.0 } else { l / candidate.len() as f64 };
    let r = if reference.is_empty() { 0.0 } else { l / reference.len() as f64 };
    (p, r, f1(p, r))
}

type Grams = BTreeSet<Vec<String>>;

fn gram_set(tokens: &[String], n: usize) -> Grams {
    windows(tokens, n).into_iter().collect()
}

fn set_f1(sys: &Grams, gold: &Grams) -> f64 {
    if sys.is_empty() && gold.is_empty() {
        return 1.0;
    }
    let hit = sys.iter().filter(|g| gold.contains(*g)).count() as f64;
    let p = if sys.is_empty() { 0.0 } else { hit / sys.len() as f64 };
    let r = if gold.is_empty() { 0.0 } else { hit / gold.len() as f64 };
    f1(p, r)
}

fn set_precision(sys: &Grams, gold: &Grams) -> f64 {
    if sys.is_empty() && gold.is_empty() {
        return 1.0;
    }
    if sys.is_empty() {
        return 0.0;
    }
    sys.iter().filter(|g| gold.contains(*g)).count() as f64 / sys.len() as f64
}

/// Per-order `(f_add, f_keep, p_del)` and the 0-100 total, by enumerating
/// the n-gram sets of each operation.
pub fn sari(source: &[String], candidate: &[String], references: &[Vec<String>]) -> ([(f64, f64, f64); 4], f64) {
    let mut orders = [(0.0, 0.0, 0.0); 4];
    for n in 1..=4 {
        let s = gram_set(source, n);
        let c = gram_set(candidate, n);
        let mut r = Grams::new();
        for reference in references {
            r.extend(gram_set(reference, n));
        }
        let keep = |x: &Grams, pred: &dyn Fn(&Vec<String>) -> bool| -> Grams { x.iter().filter(|g| pred(g)).cloned().collect() };
        let add_sys = keep(&c, &|g| !s.contains(g));
        let add_gold = keep(&r, &|g| !s.contains(g));
        let keep_sys = keep(&c, &|g| s.contains(g));
        let keep_gold = keep(&r, &|g| s.contains(g));
        let del_sys = keep(&s, &|g| !c.contains(g));
        let del_gold = keep(&s, &|g| !r.contains(g));
        orders[n - 1] = (
            set_f1(&add_sys, &add_gold),
            set_f1(&keep_sys, &keep_gold),
            set_precision(&del_sys, &del_gold),
        );
    }
    let total = orders.iter().map(|(a, k, d)| (a + k + d) / 3.0).sum::<f64>() * 100.0 / 4.0;
    (orders, total)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Greedy-matching BERTScore with cosines taken pair by pair.
pub fn bertscore(candidate: &[Vec<f64>], reference: &[Vec<f64>]) -> Prf {
    let best = |xs: &[Vec<f64>], ys: &[Vec<f64>]| -> f64 {
        xs.iter()
            .map(|x| ys.iter().map(|y| cosine(x, y)).fold(f64::NEG_INFINITY, f64::max))
            .sum::<f64>()
            / xs.len() as f64
    };
    let p = best(candidate, reference);
    let r = best(reference, candidate);
    (p, r, f1(p, r))
}

pub fn harmonic_mean(xs: &[f64]) -> f64 {
    xs.len() as f64 / xs.iter().map(|x| 1.0 / x).sum::<f64>()
}

fn delta(a: f64, b: f64, interval: bool) -> f64 {
    if interval {
        (a - b).powi(2)
    } else if a == b {
        0.0
    } else {
        1.0
    }
}

// Only units with two or more values take part.
fn pairable(rows: &[Vec<Option<f64>>]) -> Vec<Vec<f64>> {
    let units = rows.first().map_or(0, Vec::len);
    (0..units)
        .map(|u| rows.iter().filter_map(|r| r[u]).collect::<Vec<f64>>())
        .filter(|v| v.len() >= 2)
        .collect()
}

fn finish(d_o: f64, d_e: f64) -> Option<f64> {
    if d_e == 0.0 {
        None
    } else if d_o == 0.0 {
        Some(1.0)
    } else {
        Some(1.0 - d_o / d_e)
    }
}

/// Krippendorff's alpha from pairwise disagreements: within-unit pairs for
/// the observed term, all pairs of pairable values for the expected term.
pub fn alpha_pairwise(rows: &[Vec<Option<f64>>], interval: bool) -> Option<f64> {
    let units = pairable(rows);
    let all: Vec<f64> = units.iter().flatten().copied().collect();
    let n = all.len() as f64;
    if all.is_empty() {
        return None;
    }
    let mut d_o = 0.0;
    for v in &units {
        let m = v.len() as f64;
        let mut s = 0.0;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j {
                    s += delta(v[i], v[j], interval);
                }
            }
        }
        d_o += s / (m - 1.0);
    }
    d_o /= n;
    let mut d_e = 0.0;
    for i in 0..all.len() {
        for j in 0..all.len() {
            if i != j {
                d_e += delta(all[i], all[j], interval);
            }
        }
    }
    d_e /= n * (n - 1.0);
    finish(d_o, d_e)
}

/// Krippendorff's alpha from an explicitly tabulated coincidence matrix over
/// the distinct values in order of first appearance.
pub fn alpha_coincidence(rows: &[Vec<Option<f64>>], interval: bool) -> Option<f64> {
    let units = pairable(rows);
    let mut labels: Vec<f64> = Vec::new();
    for v in units.iter().flatten() {
        if !labels.contains(v) {
            labels.push(*v);
        }
    }
    let pos = |v: f64| labels.iter().position(|x| *x == v).unwrap();
    let k = labels.len();
    if k == 0 {
        return None;
    }
    let mut o = vec![vec![0.0; k]; k];
    for v in &units {
        let m = v.len() as f64;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j {
                    o[pos(v[i])][pos(v[j])] += 1.0 / (m - 1.0);
                }
            }
        }
    }
    let n_c: Vec<f64> = (0..k).map(|c| (0..k).map(|d| o[c][d]).sum()).collect();
    let n: f64 = n_c.iter().sum();
    let mut d_o = 0.0;
    let mut d_e = 0.0;
    for c in 0..k {
        for d in 0..k {
            let w = delta(labels[c], labels[d], interval);
            d_o += o[c][d] * w;
            d_e += n_c[c] * n_c[d] * w;
        }
    }
    finish(d_o / n, d_e / (n * (n - 1.0)))
}
