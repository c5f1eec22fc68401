use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::OnceLock;

use lexigraph_core::activities::{
    fill_gaps, generate_activity, score_sentence, sentence_text, AidTemplates, Mode, Vocab,
};
use lexigraph_core::config::Config;
use lexigraph_core::error::Error;
use lexigraph_core::ingestion::{default_stopwords, load_pretagged, LexicalUnit, TaggedToken};
use lexigraph_core::learner_model::{LearnerModel, UpdateParams};
use lexigraph_core::morphology::AffixTable;
use lexigraph_core::pipeline::{activity_settings, build_book, BookArtifacts};
use lexigraph_core::{EmbeddingTable, Pos};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn book() -> &'static BookArtifacts {
    static BOOK: OnceLock<BookArtifacts> = OnceLock::new();
    BOOK.get_or_init(|| {
        let corpus = load_pretagged(fixtures().join("the-mystery.tsv")).unwrap();
        let vectors = fixtures().join("the-mystery.vectors.txt");
        build_book(
            corpus,
            default_stopwords(),
            &AffixTable::default(),
            |filter| EmbeddingTable::load(&vectors, Some(filter)),
            &Config::default(),
        )
        .unwrap()
    })
}

#[test]
fn fixture_builds_with_sane_shape() {
    let stats = book().stats();
    assert!(stats.targets > 500, "{stats:?}");
    assert!(stats.families < stats.targets);
    assert_eq!(stats.nodes, stats.families);
    for e in book().graph.edges() {
        assert!(e.weight >= 0.3);
    }
}

#[test]
fn every_eligible_family_yields_a_sound_activity() {
    let b = book();
    let config = Config::default();
    let aids = AidTemplates::default();
    let model = LearnerModel::new(&b.graph, "fixture", UpdateParams::default());
    let mut generated = 0;
    for family in b.families.iter() {
        let settings = activity_settings(&config, &aids, 11);
        let activity = match generate_activity(&b.book(), &model, family.id, Mode::Testing, &settings) {
            Ok(a) => a,
            Err(Error::InsufficientContext { .. }) => continue,
            Err(e) => panic!("family {} ({}): {e}", family.id, family.representative),
        };
        generated += 1;
        let view = activity.client_view();
        assert_eq!(view.options.len(), 4);
        assert_eq!(view.options.iter().collect::<HashSet<_>>().len(), 4);
        assert!(activity.option_units.iter().all(|u| u.pos == activity.target_unit.pos));
        let in_family = activity
            .option_units
            .iter()
            .filter(|u| b.families.family_of(u) == Some(family.id))
            .count();
        assert_eq!(in_family, 1);
        assert!(view.options.contains(&activity.answer_token));

        let dist = b.graph.hop_distances(family.id);
        for d in &activity.distractors {
            if let Some(f) = d.family {
                let hops = dist[f.index()];
                assert!(hops.is_none_or(|h| h >= 2), "{d:?}");
                if !d.source.is_fallback() {
                    assert_eq!(hops, Some(2));
                }
            }
        }

        assert!((3..=4).contains(&view.items.len()));
        for (item, answers) in view.items.iter().zip(&activity.gap_answers) {
            let sentence = &b.corpus.sentences[item.sentence_id];
            let members = sentence
                .iter()
                .filter(|t| LexicalUnit::from_token(t).is_some_and(|u| family.contains(&u)))
                .count();
            assert!(members >= 1);
            assert_eq!(item.gap_spans.len(), members);
            assert_eq!(
                fill_gaps(&item.text_with_gap_markers, &item.gap_spans, answers).unwrap(),
                sentence_text(sentence)
            );
        }

        let json = serde_json::to_value(view).unwrap();
        assert!(json.get("answer_token").is_none() && json.get("aids").is_none());
    }
    assert!(generated > 100, "only {generated} activities");
}

#[test]
fn activities_are_reproducible_and_learning_mode_has_aids() {
    let b = book();
    let config = Config::default();
    let aids = AidTemplates::default();
    let model = LearnerModel::new(&b.graph, "fixture", UpdateParams::default());
    let target = b.centrality.ranking()[0];
    let settings = activity_settings(&config, &aids, 3);
    let a = generate_activity(&b.book(), &model, target, Mode::Learning, &settings).unwrap();
    let again = generate_activity(&b.book(), &model, target, Mode::Learning, &settings).unwrap();
    assert_eq!(a, again);
    let aids = a.view.aids.as_ref().unwrap();
    assert_eq!(aids.len(), 4);
    assert!(aids.iter().all(|x| x.dictionary.contains(&x.option)));
}

fn token(surface: &str, pos: Pos) -> TaggedToken {
    TaggedToken {
        surface: surface.into(),
        lemma: surface.to_lowercase(),
        pos,
        sentence_id: 0,
    }
}

#[test]
fn context_mastery_never_lowers_a_score() {
    let b = book();
    let config = Config::default();
    let mut model = LearnerModel::new(&b.graph, "m", UpdateParams::default());
    // push every family below the known threshold first
    for f in b.graph.nodes().take(200) {
        model.apply_response(&b.graph, f, -1).unwrap();
    }
    let family = b.families.iter().find(|f| f.members.len() == 1).unwrap();
    let target = family.representative.clone();
    let occ = b.targets.occurrences(&target)[0];
    let sentence = &b.corpus.sentences[occ.sentence];
    let score = |m: &LearnerModel| {
        let vocab = Vocab {
            families: &b.families,
            model: m,
            stopwords: &b.stopwords,
            known_threshold: 0.5,
        };
        score_sentence(sentence, occ.sentence, &target, family, &vocab, &config.gdex)
            .unwrap()
            .score
    };
    let before = score(&model);
    for t in sentence {
        if let Some(f) = LexicalUnit::from_token(t).and_then(|u| b.families.family_of(&u)) {
            for _ in 0..5 {
                model.apply_response(&b.graph, f, 1).unwrap();
            }
        }
    }
    assert!(score(&model) >= before);

    // a pronoun can only switch the pronoun feature off
    let mut with_pronoun: Vec<TaggedToken> = sentence.clone();
    with_pronoun.insert(0, token("she", Pos::Other));
    let vocab = Vocab {
        families: &b.families,
        model: &model,
        stopwords: &b.stopwords,
        known_threshold: 0.5,
    };
    let plain = score_sentence(sentence, 0, &target, family, &vocab, &config.gdex).unwrap();
    let marked = score_sentence(&with_pronoun, 0, &target, family, &vocab, &config.gdex).unwrap();
    assert!(marked.feature_values["pronoun"] <= plain.feature_values["pronoun"]);
}
