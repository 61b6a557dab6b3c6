//! Samples the default topology and prints it as an edge list.

use hdd_consensus::graph::Graph;

fn main() -> hdd_consensus::Result<()> {
    let seed = std::env::args().nth(1).map(|s| s.parse().expect("seed")).unwrap_or(0);
    let (g, attempt) = Graph::connected_random_core(10, 3, 0.4, seed, false, 100)?;
    eprintln!(
        "{} agents, {} edges, connected after {} resamples",
        g.n_agents(),
        g.edge_count(),
        attempt
    );
    for i in 0..g.n_agents() {
        eprintln!("  {i:>2} {} {:?}", if g.is_cooperative(i) { "coop" } else { "adv " }, g.neighbors(i));
    }
    g.write_edge_list(std::io::stdout().lock())
}
