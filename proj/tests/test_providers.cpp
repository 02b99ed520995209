#include <algorithm>
#include <set>

#include "disto/providers.hpp"
#include "disto/text.hpp"
#include "doctest.h"

using namespace disto;

TEST_SUITE_BEGIN("providers");

TEST_CASE("hash embedding is deterministic, normalized, and case-robust") {
  const auto emb = make_hash_embedding(64);
  CHECK(emb->dim() == 64);
  CHECK(emb->identity() == "hash-embed-64/v1");

  const auto a = emb->embed("the river bank");
  const auto b = emb->embed("the river bank");
  CHECK((a - b).norm() == doctest::Approx(0.0));
  CHECK(a.size() == 64);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-4));

  // same tokens, different casing: embeddings built on lowercased tokens
  const auto c = emb->embed("The River Bank");
  CHECK((a - c).norm() == doctest::Approx(0.0));

  // different text lands elsewhere
  const auto d = emb->embed("a musical chord");
  CHECK((a - d).norm() > 0.1);

  // all-punctuation text embeds to the zero vector rather than exploding
  const auto e = emb->embed("?!...");
  CHECK(e.norm() == doctest::Approx(0.0));
}

TEST_CASE("related surface forms embed closer than unrelated words") {
  // shared character trigrams pull morphological variants together
  const auto emb = make_hash_embedding(64);
  const auto base = emb->embed("garden");
  const double near = (base - emb->embed("gardens")).norm();
  const double far = (base - emb->embed("xylophone")).norm();
  CHECK(near < far);
}

TEST_CASE("rule pos tagger covers the closed classes and suffix rules") {
  const auto tagger = make_rule_pos_tagger();
  const auto tags = tagger->tag({"The", "quick", "migration", "quickly", "amazed",
                                 "the", "watchful", "crowd", "."});
  REQUIRE(tags.size() == 9);
  CHECK(tags[0] == "DET");
  CHECK(tags[2] == "NOUN");   // -tion
  CHECK(tags[3] == "ADV");    // -ly
  CHECK(tags[4] == "VERB");   // -ed
  CHECK(tags[5] == "DET");
  CHECK(tags[6] == "ADJ");    // -ful
  CHECK(tags[7] == "NOUN");
  CHECK(tags[8] == "PUNCT");
}

TEST_CASE("rule pos tagger marks numbers and mid-sentence capitals") {
  const auto tagger = make_rule_pos_tagger();
  const auto tags = tagger->tag({"Emma", "paid", "42", "euros", "in", "Paris", "."});
  CHECK(tags[0] == "NOUN");  // sentence-initial capital stays generic
  CHECK(tags[1] == "VERB");
  CHECK(tags[2] == "NUM");
  CHECK(tags[4] == "ADP");
  CHECK(tags[5] == "PROPN");  // capitalized, not sentence-initial
}

TEST_CASE("is_content_tag selects nouns, verbs, adjectives") {
  CHECK(is_content_tag("NOUN"));
  CHECK(is_content_tag("PROPN"));
  CHECK(is_content_tag("VERB"));
  CHECK(is_content_tag("ADJ"));
  CHECK_FALSE(is_content_tag("DET"));
  CHECK_FALSE(is_content_tag("PUNCT"));
  CHECK_FALSE(is_content_tag("ADV"));
}

TEST_CASE("pattern ne tagger finds dates, numbers, and gazetteer entities") {
  const auto ne = make_pattern_ne_tagger();
  const auto types = ne->entity_types("Mary flew to Paris in January 1999 with 3 bags");
  // one entity per mention, in order
  REQUIRE(types.size() >= 4);
  CHECK(types[0] == "PERSON");
  CHECK(types[1] == "LOCATION");
  CHECK(std::count(types.begin(), types.end(), "DATE") >= 1);
  CHECK(std::count(types.begin(), types.end(), "NUMBER") >= 1);
  CHECK(ne->entity_types("nothing here but lowercase words").empty());
}

TEST_CASE("pos lexicon filler proposes same-class candidates, never the original") {
  const std::vector<std::string> pool = {"water",  "stream", "bank", "melody",
                                         "rhythm", "chord",  "tide", "reef"};
  const auto tagger = make_rule_pos_tagger();
  const auto filler = make_pos_lexicon_filler(pool, tagger);

  const std::vector<std::string> tokens = {"water"};
  const auto cands = filler->fill(tokens, 0, 5);
  REQUIRE_FALSE(cands.empty());
  CHECK(cands.size() <= 5);
  for (const auto& c : cands) CHECK(text::lower(c) != "water");
  // candidates come from the pool vocabulary
  for (const auto& c : cands)
    CHECK(std::find(pool.begin(), pool.end(), c) != pool.end());
}

TEST_CASE("pos lexicon filler identity changes with the pool") {
  const auto tagger = make_rule_pos_tagger();
  const auto f1 = make_pos_lexicon_filler({"water", "stream"}, tagger);
  const auto f2 = make_pos_lexicon_filler({"melody", "rhythm"}, tagger);
  const auto f3 = make_pos_lexicon_filler({"water", "stream"}, tagger);
  CHECK(f1->identity() != f2->identity());
  CHECK(f1->identity() == f3->identity());
  CHECK(f1->identity().rfind("pos-lexicon-filler/v1:", 0) == 0);
}

TEST_CASE("builtin provider suite carries identities for artifact headers") {
  const auto suite = make_builtin_providers(32);
  const auto ids = suite.identities();
  CHECK(ids.at("embedding") == "hash-embed-32/v1");
  CHECK(ids.count("pos") == 1);
  CHECK(ids.count("ne") == 1);
  // no pool yet, so no filler identity
  CHECK(ids.count("filler") == 0);
  CHECK(suite.filler == nullptr);
}

TEST_SUITE_END();
