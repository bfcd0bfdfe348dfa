#include "synthetic_dump.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "cqa/dataset_io.hpp"

namespace cqa::test {

namespace {

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st"};
constexpr const char* kNuclei[] = {"a", "e", "i", "o", "u", "ai", "ou"};
constexpr const char* kFiller[] = {"the", "and", "to", "of", "a", "in", "is", "it", "you", "that",
                                   "for", "with", "this", "be", "on", "your", "can", "if", "but", "not"};
constexpr const char* kCommentText[] = {"Thanks, that helped.", "Could you add a source?", "Not sure this applies here.",
                                        "Which country is this?", "Good point.", "This is outdated."};

std::string attr(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string stamp(Timestamp ms) { return format_timestamp(ms); }

struct Gen {
  std::mt19937_64 rng;
  std::vector<std::vector<std::string>> topic_words;

  double uniform() { return std::uniform_real_distribution<double>(0, 1)(rng); }
  double normal() { return std::normal_distribution<double>(0, 1)(rng); }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::string word_for(int topic, int i) {
    // Deterministic pseudo-words; disjoint across topics by construction.
    std::string w;
    int code = topic * 1000 + i;
    for (int s = 0; s < 3; ++s) {
      w += kOnsets[code % 16];
      code /= 16;
      w += kNuclei[(code + s) % 7];
    }
    return w + kOnsets[topic % 16];
  }

  std::string sentence(int topic, int words) {
    std::string s;
    for (int i = 0; i < words; ++i) {
      std::string w;
      if (uniform() < 0.35) {
        w = kFiller[pick(20)];
      } else {
        const auto& vocab = topic_words[static_cast<std::size_t>(uniform() < 0.9 ? topic : pick(static_cast<int>(topic_words.size())))];
        // Zipf-ish: low indices are much more frequent.
        const double u = uniform();
        w = vocab[static_cast<std::size_t>(std::min<double>(vocab.size() - 1, std::floor(vocab.size() * u * u)))];
      }
      if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      s += (i ? " " : "") + w;
    }
    return s + (uniform() < 0.8 ? "." : "?");
  }
};

struct SynthUser {
  Id id;
  double skill;
  std::int64_t reputation;
};

}  // namespace

void write_synthetic_dump(const std::filesystem::path& dir, const SyntheticDumpSpec& spec) {
  std::filesystem::create_directories(dir);
  Gen g{std::mt19937_64(spec.seed), {}};
  for (int t = 0; t < spec.topics; ++t) {
    auto& words = g.topic_words.emplace_back();
    for (int i = 0; i < 40; ++i) words.push_back(g.word_for(t, i));
  }

  std::vector<SynthUser> users;
  std::ofstream uout(dir / "Users.xml");
  std::ofstream bout(dir / "Badges.xml");
  uout << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<users>\n";
  bout << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<badges>\n";
  Id badge_id = 1;
  for (int u = 0; u < spec.users; ++u) {
    const Id id = u + 2;
    const double skill = g.normal();
    const std::int64_t rep = g.uniform() < 0.25 ? 101 : static_cast<std::int64_t>(std::exp(5.5 + 1.4 * skill + 0.5 * g.normal()));
    users.push_back({id, skill, rep});
    const auto views = static_cast<std::int64_t>(rep / 10.0 * (1 + g.uniform()));
    const auto up = static_cast<std::int64_t>(rep / 20.0 * g.uniform());
    const auto down = static_cast<std::int64_t>(up * 0.1 * g.uniform());
    uout << "  <row Id=\"" << id << "\" Reputation=\"" << rep << "\" CreationDate=\"2013-01-01T00:00:00.000\" DisplayName=\"u"
         << id << "\" Views=\"" << views << "\" UpVotes=\"" << up << "\" DownVotes=\"" << down << "\" />\n";
    const int badges = static_cast<int>(std::log1p(static_cast<double>(rep)) * g.uniform() * 2);
    for (int b = 0; b < badges; ++b) {
      const double r = g.uniform();
      const int cls = r < 0.05 ? 1 : r < 0.3 ? 2 : 3;
      bout << "  <row Id=\"" << badge_id++ << "\" UserId=\"" << id << "\" Name=\"b\" Date=\"2013-02-01T00:00:00.000\" Class=\""
           << cls << "\" TagBased=\"False\" />\n";
    }
  }
  uout << "</users>\n";
  bout << "</badges>\n";

  // Answerers are drawn with weight rising in skill.
  std::vector<double> weights;
  for (const auto& u : users) weights.push_back(std::exp(0.8 * u.skill));
  std::discrete_distribution<std::size_t> answerer(weights.begin(), weights.end());
  auto pick_user = [&]() -> const SynthUser& { return users[static_cast<std::size_t>(g.pick(spec.users))]; };
  auto owner_attr = [&](const SynthUser& u) {
    return g.uniform() < spec.anonymous_rate ? std::string() : " OwnerUserId=\"" + std::to_string(u.id) + "\"";
  };

  std::ofstream pout(dir / "Posts.xml");
  std::ofstream cout_(dir / "Comments.xml");
  pout << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n";
  cout_ << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<comments>\n";
  Id post_id = 1;
  Id comment_id = 1;
  Timestamp clock = parse_timestamp("2014-01-01T00:00:00");
  auto add_comments = [&](Id target, Timestamp after) {
    const int n = g.uniform() < 0.4 ? 1 + g.pick(3) : 0;
    for (int c = 0; c < n; ++c) {
      const auto& by = pick_user();
      cout_ << "  <row Id=\"" << comment_id++ << "\" PostId=\"" << target << "\" Score=\"0\" Text=\""
            << attr(kCommentText[g.pick(6)]) << "\" CreationDate=\"" << stamp(after + 60'000 * (1 + g.pick(600)))
            << "\" UserId=\"" << by.id << "\" />\n";
    }
  };

  for (int q = 0; q < spec.questions; ++q) {
    clock += 3'600'000 * (1 + g.pick(20));
    const int topic = g.pick(spec.topics);
    const auto& asker = pick_user();
    const Id qid = post_id++;
    std::vector<std::string> q_sentences;
    const int nq = 2 + g.pick(4);
    for (int s = 0; s < nq; ++s) q_sentences.push_back(g.sentence(topic, 6 + g.pick(10)));
    std::string q_html = "<p>";
    for (const auto& s : q_sentences) q_html += s + " ";
    q_html += "</p>";

    struct Draft {
      Id id;
      const SynthUser* author;
      double quality;
      Timestamp created;
      std::string html;
      std::int64_t score;
    };
    std::vector<Draft> answers;
    const int n_answers = 1 + std::min(spec.max_answers - 1, static_cast<int>(std::poisson_distribution<int>(1.8)(g.rng)));
    Timestamp t = clock;
    for (int a = 0; a < n_answers; ++a) {
      const SynthUser* author = &users[answerer(g.rng)];
      if (author->id == asker.id && g.uniform() < 0.8) author = &users[answerer(g.rng)];
      t += 60'000 * (5 + g.pick(240)) * (a + 1);
      const double quality = 0.6 * author->skill - 0.25 * a + g.normal();
      std::string html;
      if (g.uniform() < 0.15 + 0.1 * (quality > 0)) {
        html += "<blockquote>" + (g.uniform() < 0.7 ? q_sentences[static_cast<std::size_t>(g.pick(nq))] : g.sentence(topic, 5)) +
                "</blockquote>";
      }
      const int paragraphs = 1 + std::max(0, static_cast<int>(1.5 + quality + g.normal()));
      for (int p = 0; p < paragraphs; ++p) {
        html += "<p>";
        const int ns = 1 + g.pick(3);
        for (int s = 0; s < ns; ++s) html += g.sentence(topic, 5 + g.pick(12)) + " ";
        if (g.uniform() < 0.1 + 0.1 * (quality > 0.5)) html += "<strong>" + g.sentence(topic, 3) + "</strong> ";
        if (g.uniform() < 0.08 + 0.1 * (quality > 0.5)) html += "See <a href=\"https://example.org/" + std::to_string(post_id) + "\">here</a>.";
        html += "</p>";
      }
      const auto score = static_cast<std::int64_t>(std::lround(1.5 * quality + 1.5 + 0.7 * g.normal()));
      answers.push_back({post_id++, author, quality, t, html, score});
    }

    std::optional<Id> accepted;
    if (g.uniform() < spec.accepted_rate) {
      std::size_t best = 0;
      double best_v = -1e300;
      for (std::size_t a = 0; a < answers.size(); ++a) {
        const double v = answers[a].quality + 0.6 * g.normal();
        if (v > best_v) {
          best_v = v;
          best = a;
        }
      }
      accepted = answers[best].id;
      answers[best].score += 1;
    }
    const auto q_score = static_cast<std::int64_t>(std::lround(1 + 2 * g.normal()));
    pout << "  <row Id=\"" << qid << "\" PostTypeId=\"1\"";
    if (accepted) pout << " AcceptedAnswerId=\"" << *accepted << "\"";
    pout << " CreationDate=\"" << stamp(clock) << "\" Score=\"" << q_score << "\" ViewCount=\"" << 50 + g.pick(5000)
         << "\" Body=\"" << attr(q_html) << "\"" << owner_attr(asker) << " Title=\"Question " << qid << "\" AnswerCount=\""
         << answers.size() << "\" />\n";
    add_comments(qid, clock);
    for (const auto& a : answers) {
      pout << "  <row Id=\"" << a.id << "\" PostTypeId=\"2\" ParentId=\"" << qid << "\" CreationDate=\"" << stamp(a.created)
           << "\" Score=\"" << a.score << "\" Body=\"" << attr(a.html) << "\"" << owner_attr(*a.author) << " />\n";
      add_comments(a.id, a.created);
    }
    if (q % 40 == 39) {
      // Tag wiki excerpt and an orphan answer, as found in real dumps.
      pout << "  <row Id=\"" << post_id++ << "\" PostTypeId=\"4\" CreationDate=\"" << stamp(clock)
           << "\" Score=\"0\" Body=\"&lt;p&gt;excerpt&lt;/p&gt;\" />\n";
      pout << "  <row Id=\"" << post_id++ << "\" PostTypeId=\"2\" ParentId=\"999999999\" CreationDate=\"" << stamp(clock)
           << "\" Score=\"0\" Body=\"&lt;p&gt;lost&lt;/p&gt;\" />\n";
    }
  }
  pout << "</posts>\n";
  cout_ << "</comments>\n";
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(CQA_TEST_SCRATCH) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Dataset load_dump(const std::filesystem::path& dir) { return cqa::load_dump(dir); }

}  // namespace cqa::test
