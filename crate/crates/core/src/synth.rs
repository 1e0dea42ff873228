//! Deterministic synthetic movie datasets for tests and benchmarks.
//!
//! The same seed always produces the same triples, so measurements and
//! randomized comparisons are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rdf::{Dataset, Term, Triple, RDF_TYPE};

pub const NS: &str = "http://example.org/movies#";

const GENRE_POOL: [&str; 8] =
    ["scifi", "action", "drama", "comedy", "horror", "thriller", "western", "romance"];

fn local(name: &str) -> Term {
    Term::iri(format!("{}{}", NS, name))
}

pub fn film_iri(index: usize) -> Term {
    local(&format!("film{}", index))
}

#[derive(Clone, Copy, Debug)]
pub struct MovieConfig {
    pub films: usize,
    /// Number of distinct genres, at most eight.
    pub genres: usize,
    pub seed: u64,
}

impl Default for MovieConfig {
    fn default() -> MovieConfig {
        MovieConfig { films: 50, genres: 4, seed: 7 }
    }
}

/// Films with a title, genre, runtime, year and rating; about half the
/// films continue a sequel chain within their genre.
pub fn movies(config: &MovieConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let genres = config.genres.clamp(1, GENRE_POOL.len());
    let mut ds = Dataset::new();
    let mut last_of_genre: Vec<Option<usize>> = vec![None; genres];
    for i in 0..config.films {
        let film = film_iri(i);
        let genre = rng.gen_range(0..genres);
        ds.insert(Triple::new(film.clone(), Term::iri(RDF_TYPE), local("film")));
        ds.insert(Triple::new(
            film.clone(),
            local("title"),
            Term::string(format!("Movie {}", i)),
        ));
        ds.insert(Triple::new(film.clone(), local("genre"), local(GENRE_POOL[genre])));
        ds.insert(Triple::new(
            film.clone(),
            local("runtime"),
            Term::integer(rng.gen_range(80..=180)),
        ));
        ds.insert(Triple::new(
            film.clone(),
            local("year"),
            Term::integer(rng.gen_range(1970..=2025)),
        ));
        ds.insert(Triple::new(
            film.clone(),
            local("rating"),
            Term::integer(rng.gen_range(1..=10)),
        ));
        if let Some(prev) = last_of_genre[genre] {
            if rng.gen_bool(0.5) {
                ds.insert(Triple::new(film_iri(prev), local("sequel"), film.clone()));
            }
        }
        last_of_genre[genre] = Some(i);
    }
    ds
}

/// One genre, strictly ascending runtimes: film `i` runs `100 + i`
/// minutes, so exactly the last film survives winnowing and a scan in
/// insertion order meets its dominator as late as possible.
pub fn runtime_chain(n: usize) -> Dataset {
    let mut ds = Dataset::new();
    for i in 1..=n {
        let film = film_iri(i);
        ds.insert(Triple::new(film.clone(), Term::iri(RDF_TYPE), local("film")));
        ds.insert(Triple::new(
            film.clone(),
            local("title"),
            Term::string(format!("Movie {}", i)),
        ));
        ds.insert(Triple::new(film.clone(), local("genre"), local("scifi")));
        ds.insert(Triple::new(film, local("runtime"), Term::integer(100 + i as i64)));
    }
    ds
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let config = MovieConfig { films: 20, genres: 3, seed: 42 };
        let a = movies(&config);
        let b = movies(&config);
        assert_eq!(a.to_ntriples(), b.to_ntriples());
        assert_ne!(
            a.to_ntriples(),
            movies(&MovieConfig { seed: 43, ..config }).to_ntriples()
        );
    }

    #[test]
    fn films_carry_all_attributes() {
        let ds = movies(&MovieConfig { films: 10, genres: 2, seed: 1 });
        // 6 attribute triples per film plus optional sequel edges
        assert!(ds.len() >= 60);
        let text = ds.to_ntriples();
        for i in 0..10 {
            assert!(text.contains(&format!("{}film{}", NS, i)));
        }
    }

    #[test]
    fn chain_runtimes_ascend() {
        let ds = runtime_chain(4);
        assert_eq!(ds.len(), 16);
        let text = ds.to_ntriples();
        assert!(text.contains("104"));
        assert!(!text.contains("105"));
    }
}
