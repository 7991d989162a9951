#include "chatlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chatlens/csv.hpp"
#include "chatlens/error.hpp"
#include "chatlens/ingest.hpp"
#include "chatlens/text.hpp"

namespace chatlens::synth {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCommonWords = {
    "venezuela", "colombia", "frontera", "trabajo", "dinero", "salud", "familia", "gobierno", "noticia",
    "ayuda", "comida", "precio", "dólar", "bolívar", "peso", "viaje", "cúcuta", "bogotá", "caracas",
    "medellín", "casa", "arriendo", "empleo", "documento", "pasaporte", "permiso", "migración", "policía",
    "hospital", "vacuna", "virus", "coronavirus", "cuarentena", "mercado", "tienda", "venta", "compra",
    "servicio", "agua", "luz", "gasolina", "niños", "escuela", "iglesia", "dios", "gracias", "buenos",
    "días", "noches", "saludos", "hermanos", "amigos", "grupo", "mensaje", "información", "favor",
    "urgente", "importante", "mañana", "hoy", "semana", "calle", "barrio", "ciudad", "pueblo", "camino",
    "carro", "moto", "teléfono", "número", "llamar", "enviar", "recibir", "pagar", "cobrar", "banco",
    "transferencia", "cambio", "tasa", "remesa", "paquete", "encomienda", "ropa", "zapatos", "medicina",
    "doctor", "cita", "consulta", "registro", "censo", "alcaldía", "ministerio", "presidente", "protesta",
    "marcha", "río", "puente", "cruce", "terminal", "pasaje", "boleto"};

const std::vector<std::string> kScamWords = {
    "préstamo", "obtenga", "gratis", "ganar", "bono", "regístrate", "enlace", "premio", "regalo",
    "oferta", "inversión", "ganancias", "diarias", "dólares", "tarjeta", "depósito", "clic", "rápido",
    "seguro", "garantizado", "millones", "sorteo", "cupón", "descuento", "aprobado", "crédito",
    "efectivo", "whatsapp", "link", "felicidades", "ganador", "reclama", "promoción", "cupos",
    "limitados", "ingresos"};

const std::vector<std::string> kFakeWords = {
    "cura", "limón", "ajo", "bicarbonato", "laboratorio", "secreto", "médicos", "ocultan", "chip",
    "antenas", "muertos", "falso", "china", "científicos", "descubren", "remedio", "caliente", "tomar",
    "contagio", "sistema", "inmune", "comparte", "alerta", "oficial", "confirmado", "decreto", "toque",
    "queda", "militares", "ejército", "pandemia", "vitamina", "beber"};

const std::vector<std::string> kStopwords = {"de", "la", "que", "el", "en", "y", "a", "los", "se", "del",
                                             "las", "un", "por", "con", "no", "una", "su", "para", "es",
                                             "al", "lo", "como", "más", "pero", "ya", "muy", "hay", "todo"};

const std::vector<double> kHourWeights = {3, 2, 1, 1, 1, 2, 4, 7, 9, 10, 10, 10,
                                          11, 10, 9, 9, 9, 10, 11, 12, 12, 10, 8, 5};

const char* const kEmoji = "\xF0\x9F\x98\x82";  // U+1F602

struct OtherCountry {
  const char* prefix;
  const char* lead;
  int digits;
};
const OtherCountry kOthers[] = {{"593", "9", 8}, {"51", "9", 8}, {"56", "9", 8}, {"54", "9", 10}, {"1", "305", 7}};

struct GroupState {
  std::string title;
  std::optional<std::string> icon;
  std::string uid;
  std::vector<std::string> members;
  std::vector<double> weights;
  std::vector<std::string> topic;
  bool renamed = false;
  std::string new_title;
  std::optional<std::string> new_icon;
  std::string new_uid;
  Timestamp rename_at;
};

struct Draft {
  Message message;
  std::size_t group = 0;
  std::uint64_t seq = 0;
};

std::string digits(Rng& rng, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.below(10)));
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string pad_id(std::uint64_t n) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "m%07llu", static_cast<unsigned long long>(n));
  return buf;
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s.push_back(' ');
    s += w;
  }
  return s;
}

// Server B reports the group through its profile picture link and leaves the
// uid to be derived by the reader.
std::string as_icon_url_record(const std::string& line) {
  auto j = ordered_json::parse(line);
  j["group_uid"] = nullptr;
  if (j["group_icon_uid"].is_string()) {
    j["group_icon_uid"] = "https://pps.whatsapp.net/v/t61.24694-24/photo.jpg?oe=5E8C&u=" +
                          j["group_icon_uid"].get<std::string>() + "%40g.us";
  }
  return j.dump();
}

class Generator {
 public:
  explicit Generator(const GenConfig& c) : cfg_(c), rng_(c.seed), tz_{c.tz_offset_minutes} {}

  Generated run();

 private:
  std::string new_user(double p_co, double p_ve);
  std::string pseudo_word();
  std::string pick(const std::vector<std::string>& pool) { return pool[rng_.below(pool.size())]; }
  std::string chat_text(const GroupState& g, Timestamp t);
  void make_groups();
  void make_messages();
  void plant_misinfo(Generated& out);
  void read_logs(Generated& out);
  std::string uid_at(const GroupState& g, Timestamp t) const {
    return g.renamed && t >= g.rename_at ? g.new_uid : g.uid;
  }

  const GenConfig& cfg_;
  Rng rng_;
  TzOffset tz_;
  Timestamp t0_, t_end_;
  std::vector<GroupState> groups_;
  std::vector<std::string> user_order_;
  std::set<std::string> users_;
  std::set<std::string> used_stems_;
  std::vector<std::vector<Draft>> by_group_;
  std::uint64_t seq_ = 0;
  std::vector<std::pair<std::string, std::optional<std::int64_t>>> image_pool_, video_pool_;
  Timestamp spike_;
  GroundTruth truth_;
};

std::string Generator::new_user(double p_co, double p_ve) {
  while (true) {
    const double u = rng_.uniform();
    std::string e164;
    if (u < p_co) {
      e164 = "573" + digits(rng_, 9);
    } else if (u < p_co + p_ve) {
      e164 = "584" + digits(rng_, 9);
    } else {
      const auto& o = kOthers[rng_.below(std::size(kOthers))];
      e164 = std::string(o.prefix) + o.lead + digits(rng_, o.digits);
    }
    if (users_.insert(e164).second) {
      user_order_.push_back(e164);
      return e164;
    }
  }
}

std::string Generator::pseudo_word() {
  static const std::string consonants = "bcdfgjklmnprstvz";
  static const std::string vowels = "aeiou";
  static const std::string finals = "lnr";
  while (true) {
    std::string w;
    for (int s = 0; s < 3; ++s) {
      w.push_back(consonants[rng_.below(consonants.size())]);
      w.push_back(vowels[rng_.below(vowels.size())]);
    }
    w.push_back(finals[rng_.below(finals.size())]);
    auto tokens = text::tokenize(w);
    if (tokens.size() == 1 && used_stems_.insert(tokens[0]).second) return w;
  }
}

std::string Generator::chat_text(const GroupState& g, Timestamp t) {
  std::vector<std::string> words;
  if (rng_.chance(0.14)) {
    words.push_back(rng_.chance(0.5) ? pick(g.topic) : pick(kCommonWords));
  } else {
    const std::size_t n = 3 + rng_.below(14);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng_.uniform();
      if (u < 0.3) {
        words.push_back(pick(kStopwords));
      } else if (u < 0.65) {
        words.push_back(pick(g.topic));
      } else {
        words.push_back(pick(kCommonWords));
      }
    }
    const double rate = t >= spike_ ? cfg_.keyword_spike_rate : cfg_.keyword_base_rate;
    if (rng_.chance(rate)) words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng_.below(words.size() + 1)), cfg_.keyword);
  }
  std::string s = join(words);
  if (rng_.chance(0.1)) s += "?";
  return s;
}

void Generator::make_groups() {
  const double alpha = std::max(cfg_.size_exponent - 1.0, 0.1);
  for (std::size_t gi = 0; gi < cfg_.n_groups; ++gi) {
    GroupState g;
    const double u = 1.0 - rng_.uniform();
    auto size = static_cast<std::size_t>(static_cast<double>(cfg_.min_group_size) * std::pow(u, -1.0 / alpha));
    size = std::clamp(size, cfg_.min_group_size, cfg_.max_group_size);
    const double p_ve = 0.1 + 0.8 * rng_.uniform();
    const double p_co = (1.0 - p_ve) * 0.85;
    std::set<std::string> in_group;
    for (std::size_t i = 0; i < size; ++i) {
      std::string user;
      if (!user_order_.empty() && rng_.chance(cfg_.cross_membership)) {
        for (int attempt = 0; attempt < 5 && user.empty(); ++attempt) {
          const auto& cand = user_order_[rng_.below(user_order_.size())];
          if (!in_group.count(cand)) user = cand;
        }
      }
      if (user.empty()) user = new_user(p_co, p_ve);
      in_group.insert(user);
      g.members.push_back(user);
      g.weights.push_back(1.0 / std::pow(static_cast<double>(i + 1), cfg_.sender_skew));
    }
    for (int k = 0; k < 10; ++k) g.topic.push_back(pseudo_word());
    g.title = "Grupo " + g.topic[0] + " " + std::to_string(gi + 1);
    if (rng_.below(100) < cfg_.icon_percent) {
      g.icon = g.members.front() + "-" + std::to_string(1580000000 + gi * 1000 + rng_.below(1000));
    }
    g.uid = derive_uid(g.icon, g.title);
    groups_.push_back(std::move(g));
  }
  std::vector<std::size_t> order(groups_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t renames = std::min(cfg_.n_rename_events, groups_.size());
  for (std::size_t r = 0; r < renames; ++r) {
    std::size_t j = r + rng_.below(order.size() - r);
    std::swap(order[r], order[j]);
    GroupState& g = groups_[order[r]];
    g.renamed = true;
    g.new_title = g.title + " oficial";
    if (g.icon) g.new_icon = g.members.front() + "-" + std::to_string(1590000000 + order[r] * 1000 + rng_.below(1000));
    g.new_uid = derive_uid(g.new_icon, g.new_title);
    const double frac = 0.3 + 0.4 * rng_.uniform();
    const auto span = static_cast<double>(t_end_.seconds - t0_.seconds);
    g.rename_at = Timestamp{t0_.seconds + static_cast<std::int64_t>(frac * span)}.truncated_to_minute();
  }
}

void Generator::make_messages() {
  by_group_.resize(groups_.size());
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const GroupState& g = groups_[gi];
    auto& list = by_group_[gi];
    const double lambda = static_cast<double>(g.members.size()) * cfg_.messages_per_member_day;
    for (std::size_t d = 0; d < cfg_.n_days; ++d) {
      const std::int64_t day_start = t0_.seconds + static_cast<std::int64_t>(d) * 86400;
      const std::uint64_t n = rng_.poisson(lambda);
      std::vector<std::int64_t> times;
      for (std::uint64_t k = 0; k < n; ++k) {
        const auto hour = static_cast<std::int64_t>(rng_.weighted(kHourWeights));
        times.push_back(day_start + hour * 3600 + static_cast<std::int64_t>(rng_.below(60)) * 60);
      }
      std::sort(times.begin(), times.end());
      for (std::int64_t ts : times) {
        Draft draft;
        draft.group = gi;
        draft.seq = seq_++;
        Message& m = draft.message;
        m.id = pad_id(draft.seq);
        m.sent_time = Timestamp{ts};
        m.group_uid = uid_at(g, m.sent_time);
        m.sender = parse_phone(g.members[rng_.weighted(g.weights)]);
        const double u = rng_.uniform();
        if (u < cfg_.p_image || (u < cfg_.p_image + cfg_.p_video)) {
          const bool video = u >= cfg_.p_image;
          m.kind = video ? MessageKind::Video : MessageKind::Image;
          auto& pool = video ? video_pool_ : image_pool_;
          if (!pool.empty() && rng_.chance(cfg_.reshare_rate)) {
            const auto& [hash, dur] = pool[rng_.below(pool.size())];
            m.media_hash = hash;
            m.media_duration_s = dur;
          } else {
            m.media_hash = hex64(rng_.next());
            if (video) m.media_duration_s = static_cast<std::int64_t>(5 + rng_.below(240));
            pool.emplace_back(*m.media_hash, m.media_duration_s);
          }
        } else if (u < cfg_.p_image + cfg_.p_video + cfg_.p_audio) {
          m.kind = MessageKind::Audio;
          m.media_hash = hex64(rng_.next());
          m.media_duration_s = static_cast<std::int64_t>(2 + rng_.below(120));
        } else {
          m.kind = MessageKind::Text;
          m.text = chat_text(g, m.sent_time);
          if (rng_.chance(cfg_.emoji_rate)) {
            *m.text += std::string(" ") + kEmoji;
            m.has_emoji = true;
          }
        }
        m.forwarded = rng_.chance(cfg_.forward_rate);
        if (rng_.chance(cfg_.reply_probability)) {
          if (rng_.chance(cfg_.missing_parent_rate)) {
            m.reply_to = "x" + hex64(rng_.next());
            truth_.missing_parent_replies.push_back(m.id);
          } else {
            std::vector<std::size_t> recent, recent_replies;
            for (std::size_t i = list.size(); i-- > 0;) {
              if (ts - list[i].message.sent_time.seconds > cfg_.reply_window_minutes * 60) break;
              recent.push_back(i);
              if (list[i].message.reply_to) recent_replies.push_back(i);
            }
            if (!recent.empty()) {
              const auto& from = (!recent_replies.empty() && rng_.chance(cfg_.reply_to_reply)) ? recent_replies : recent;
              m.reply_to = list[from[rng_.below(from.size())]].message.id;
            }
          }
        }
        list.push_back(draft);
        if (rng_.chance(cfg_.true_duplicate_rate)) {
          std::vector<std::string> set{m.id};
          const std::size_t copies = rng_.chance(0.2) ? 2 : 1;
          for (std::size_t c = 0; c < copies; ++c) {
            Draft dup = list.back();
            dup.seq = seq_++;
            dup.message.id = pad_id(dup.seq);
            set.push_back(dup.message.id);
            list.push_back(std::move(dup));
          }
          truth_.true_duplicate_sets.push_back(std::move(set));
        }
      }
    }
  }
}

void Generator::plant_misinfo(Generated& out) {
  std::vector<misinfo::LabeledItem> items;
  const std::size_t n_templates = cfg_.n_scam_templates + cfg_.n_fake_templates;
  const auto span = static_cast<double>(t_end_.seconds - t0_.seconds);
  for (std::size_t tid = 0; tid < n_templates; ++tid) {
    const bool scam = tid < cfg_.n_scam_templates;
    const auto& pool = scam ? kScamWords : kFakeWords;
    std::vector<std::string> words;
    std::vector<std::size_t> pool_positions;
    for (int k = 0; k < 3; ++k) words.push_back(pseudo_word());
    for (int k = 0; k < 11; ++k) {
      pool_positions.push_back(words.size());
      words.push_back(pick(pool));
    }
    const std::string template_text = join(words);
    misinfo::LabeledItem item;
    item.corpus_id = (scam ? "scam-" : "fake-") + std::to_string(scam ? tid + 1 : tid - cfg_.n_scam_templates + 1);
    item.label = scam ? misinfo::Label::Scam : misinfo::Label::FakeNews;
    item.text = template_text;
    item.source = scam ? misinfo::Source::Manual : misinfo::Source::Factcheck;
    items.push_back(item);

    std::vector<std::string> variants{template_text};
    for (std::size_t v = 1; v < cfg_.variants_per_template; ++v) {
      auto mutated = words;
      auto positions = pool_positions;
      for (std::size_t s = 0; s < cfg_.mutation_rate && !positions.empty(); ++s) {
        const std::size_t k = rng_.below(positions.size());
        const std::size_t pos = positions[k];
        positions.erase(positions.begin() + static_cast<std::ptrdiff_t>(k));
        std::string repl;
        do {
          repl = pick(pool);
        } while (repl == mutated[pos]);
        mutated[pos] = repl;
      }
      variants.push_back(join(mutated));
    }

    for (std::size_t inst = 0; inst < cfg_.instances_per_template; ++inst) {
      if (groups_.empty()) break;
      const std::size_t gi = rng_.below(groups_.size());
      const GroupState& g = groups_[gi];
      // the first instances land early so every template is seen before the late test span
      const double frac = inst < 2 ? 0.4 * rng_.uniform() : rng_.uniform();
      Draft draft;
      draft.group = gi;
      draft.seq = seq_++;
      Message& m = draft.message;
      m.id = pad_id(draft.seq);
      m.sent_time = Timestamp{t0_.seconds + static_cast<std::int64_t>(frac * span)}.truncated_to_minute();
      m.group_uid = uid_at(g, m.sent_time);
      m.sender = parse_phone(g.members[rng_.weighted(g.weights)]);
      m.kind = MessageKind::Text;
      const std::size_t vid = inst % std::max<std::size_t>(1, variants.size());
      m.text = variants[vid];
      m.forwarded = rng_.chance(0.7);
      truth_.planted.push_back({tid, vid, m.id, item.label, *m.text, template_text});
      by_group_[gi].push_back(std::move(draft));
    }
  }
  out.labeled = misinfo::LabeledCorpus(std::move(items));
}

void Generator::read_logs(Generated& out) {
  for (auto& list : by_group_) {
    std::stable_sort(list.begin(), list.end(), [](const Draft& a, const Draft& b) {
      return std::tie(a.message.sent_time, a.seq) < std::tie(b.message.sent_time, b.seq);
    });
  }
  const auto interval = static_cast<std::int64_t>(cfg_.read_interval_hours * 3600);
  const auto overlap = static_cast<std::int64_t>(cfg_.rescroll_overlap * static_cast<double>(interval));
  const std::string servers[] = {"A", "B"};
  std::vector<std::set<std::string>> reread(groups_.size());
  std::set<std::pair<std::size_t, std::string>> seen;  // (group, id) sightings under the group's first uid

  for (std::size_t s = 0; s < 2; ++s) {
    const auto lag = static_cast<std::int64_t>(static_cast<double>(s) * cfg_.server_lag_hours * 3600);
    auto& lines = out.logs[servers[s]];
    std::int64_t prev = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t k = 0;; ++k) {
      const std::int64_t read_at = t0_.seconds + lag + (k + 1) * interval + static_cast<std::int64_t>(rng_.below(600));
      for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
        const GroupState& g = groups_[gi];
        const auto& list = by_group_[gi];
        std::int64_t from = prev == std::numeric_limits<std::int64_t>::min() ? prev : prev - overlap;
        const bool after_rename = g.renamed && read_at >= g.rename_at.seconds;
        if (after_rename && prev < g.rename_at.seconds) {
          std::vector<std::size_t> pre;
          for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].message.sent_time < g.rename_at) pre.push_back(i);
          }
          if (!pre.empty()) {
            const auto skip = static_cast<std::size_t>(
                std::floor((1.0 - cfg_.rename_overlap) * static_cast<double>(pre.size())));
            const std::int64_t cutoff = list[pre[std::min(skip, pre.size() - 1)]].message.sent_time.seconds;
            from = std::min(from, cutoff - 1);
          }
        }
        Group current;
        current.uid = after_rename ? g.new_uid : g.uid;
        current.title = after_rename ? g.new_title : g.title;
        current.icon_uid = after_rename ? g.new_icon : g.icon;
        for (const auto& d : list) {
          const std::int64_t ts = d.message.sent_time.seconds;
          if (ts <= from || ts > read_at) continue;
          Message m = d.message;
          m.group_uid = current.uid;
          m.provenance = {servers[s], Timestamp{read_at}};
          if (after_rename && d.message.sent_time < g.rename_at) {
            reread[gi].insert(m.id);
          } else if (!after_rename) {
            seen.insert({gi, m.id});
          }
          std::string line = ingest::to_log_line(m, &current, tz_);
          if (s == 1) line = as_icon_url_record(line);
          lines.push_back(std::move(line));
          ++truth_.emitted_records;
        }
      }
      prev = read_at;
      if (read_at >= t_end_.seconds) break;
    }
  }
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const GroupState& g = groups_[gi];
    if (!g.renamed) continue;
    RenameEvent ev;
    ev.group_index = gi;
    ev.old_uid = g.uid;
    ev.new_uid = g.new_uid;
    ev.at = g.rename_at;
    for (const auto& d : by_group_[gi]) {
      if (!reread[gi].count(d.message.id)) continue;
      if (seen.count({gi, d.message.id})) {
        ev.reread_ids.push_back(d.message.id);
      } else {
        ev.unread_before_ids.push_back(d.message.id);
      }
    }
    truth_.renames.push_back(std::move(ev));
  }
}

Generated Generator::run() {
  cfg_.validate();
  auto start = parse_date(cfg_.start_date);
  if (!start) throw ArgumentError("start_date is not YYYY-MM-DD: " + cfg_.start_date);
  t0_ = start_of_day(*start, tz_);
  t_end_ = Timestamp{t0_.seconds + static_cast<std::int64_t>(cfg_.n_days) * 86400};
  spike_ = Timestamp{t0_.seconds +
                     static_cast<std::int64_t>(cfg_.keyword_spike_at * static_cast<double>(cfg_.n_days)) * 86400};
  truth_.keyword_spike_date = local_date(spike_, tz_);
  for (const auto* pool : {&kCommonWords, &kScamWords, &kFakeWords}) {
    for (const auto& w : *pool) {
      for (auto& t : text::tokenize(w)) used_stems_.insert(t);
    }
  }

  Generated out;
  make_groups();
  make_messages();
  plant_misinfo(out);
  read_logs(out);

  std::size_t reread_total = 0;
  for (const auto& r : truth_.renames) reread_total += r.reread_ids.size();
  for (std::size_t gi = 0; gi < by_group_.size(); ++gi) {
    for (const auto& d : by_group_[gi]) truth_.messages.push_back({d.message, gi});
  }
  std::stable_sort(truth_.messages.begin(), truth_.messages.end(), [](const TrueMessage& a, const TrueMessage& b) {
    return std::tie(a.message.sent_time, a.message.id) < std::tie(b.message.sent_time, b.message.id);
  });
  truth_.read_duplicates = truth_.emitted_records - truth_.messages.size() - reread_total;
  out.truth = std::move(truth_);
  return out;
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

std::size_t Rng::weighted(const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

std::uint64_t Rng::poisson(double lambda) {
  if (lambda <= 0) return 0;
  if (lambda > 500) {
    // normal approximation; far outside the configured ranges
    const double u1 = 1.0 - uniform(), u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    return static_cast<std::uint64_t>(std::max(0.0, std::round(lambda + std::sqrt(lambda) * z)));
  }
  const double limit = std::exp(-lambda);
  std::uint64_t k = 0;
  double p = uniform();
  while (p > limit) {
    ++k;
    p *= uniform();
  }
  return k;
}

void GenConfig::validate() const {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0 && v <= 1)) throw ArgumentError(std::string(name) + " must be in [0, 1]");
  };
  rate(cross_membership, "cross_membership");
  rate(p_image, "p_image");
  rate(p_video, "p_video");
  rate(p_audio, "p_audio");
  if (p_image + p_video + p_audio > 1) throw ArgumentError("media probabilities sum above 1");
  rate(forward_rate, "forward_rate");
  rate(emoji_rate, "emoji_rate");
  rate(reshare_rate, "reshare_rate");
  rate(reply_probability, "reply_probability");
  rate(reply_to_reply, "reply_to_reply");
  rate(missing_parent_rate, "missing_parent_rate");
  rate(true_duplicate_rate, "true_duplicate_rate");
  rate(rescroll_overlap, "rescroll_overlap");
  rate(rename_overlap, "rename_overlap");
  rate(keyword_base_rate, "keyword_base_rate");
  rate(keyword_spike_rate, "keyword_spike_rate");
  rate(keyword_spike_at, "keyword_spike_at");
  if (icon_percent > 100) throw ArgumentError("icon_percent must be at most 100");
  if (min_group_size < 1 || max_group_size < min_group_size) throw ArgumentError("invalid group size bounds");
  if (n_days < 1) throw ArgumentError("n_days must be positive");
  if (!(read_interval_hours > 0)) throw ArgumentError("read_interval_hours must be positive");
  if (server_lag_hours < 0) throw ArgumentError("server_lag_hours must be non-negative");
  if (messages_per_member_day < 0) throw ArgumentError("messages_per_member_day must be non-negative");
  if (variants_per_template < 1) throw ArgumentError("variants_per_template must be at least 1");
  if (mutation_rate > 11) throw ArgumentError("mutation_rate exceeds the substitutable words of a template");
  if (keyword.empty()) throw ArgumentError("keyword must not be empty");
}

#define CHATLENS_CONFIG_FIELDS(X)                                                                              \
  X(seed) X(n_groups) X(size_exponent) X(min_group_size) X(max_group_size) X(cross_membership) X(icon_percent) \
  X(start_date) X(n_days) X(tz_offset_minutes) X(messages_per_member_day) X(sender_skew) X(p_image) X(p_video) \
  X(p_audio) X(forward_rate) X(emoji_rate) X(reshare_rate) X(reply_probability) X(reply_to_reply)             \
  X(missing_parent_rate) X(reply_window_minutes) X(true_duplicate_rate) X(read_interval_hours)                 \
  X(rescroll_overlap) X(server_lag_hours) X(n_rename_events) X(rename_overlap) X(n_scam_templates)             \
  X(n_fake_templates) X(variants_per_template) X(mutation_rate) X(instances_per_template) X(keyword)           \
  X(keyword_base_rate) X(keyword_spike_rate) X(keyword_spike_at)

GenConfig GenConfig::from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("generator config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("generator config must be a JSON object");
  GenConfig c;
  std::set<std::string> known;
#define X(field)                                                                              \
  known.insert(#field);                                                                       \
  if (auto it = j.find(#field); it != j.end()) {                                              \
    try {                                                                                     \
      it->get_to(c.field);                                                                    \
    } catch (const nlohmann::json::exception&) {                                              \
      throw DataError("generator config field '" #field "' has the wrong type");              \
    }                                                                                         \
  }
  CHATLENS_CONFIG_FIELDS(X)
#undef X
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw DataError("unknown generator config field '" + key + "'");
  }
  c.validate();
  return c;
}

std::string GenConfig::to_json_text() const {
  ordered_json j;
#define X(field) j[#field] = field;
  CHATLENS_CONFIG_FIELDS(X)
#undef X
  return j.dump(2);
}

GenConfig GenConfig::small(std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  c.n_groups = 6;
  c.min_group_size = 4;
  c.max_group_size = 20;
  c.n_days = 10;
  c.messages_per_member_day = 0.5;
  c.true_duplicate_rate = 0.05;
  c.n_rename_events = 1;
  c.n_scam_templates = 2;
  c.n_fake_templates = 1;
  c.instances_per_template = 4;
  return c;
}

Generated generate(const GenConfig& config) { return Generator(config).run(); }

std::string ground_truth_json(const Generated& g, const GenConfig& config) {
  const TzOffset tz{config.tz_offset_minutes};
  const GroundTruth& t = g.truth;
  ordered_json j;
  j["prng"] = "mt19937_64";
  j["seed"] = config.seed;
  j["counts"] = {{"messages", t.messages.size()},
                 {"emitted_records", t.emitted_records},
                 {"read_duplicates", t.read_duplicates},
                 {"true_duplicate_sets", t.true_duplicate_sets.size()},
                 {"renames", t.renames.size()},
                 {"planted", t.planted.size()}};
  j["true_duplicate_sets"] = t.true_duplicate_sets;
  ordered_json renames = ordered_json::array();
  for (const auto& r : t.renames) {
    renames.push_back({{"old_uid", r.old_uid},
                       {"new_uid", r.new_uid},
                       {"at", format_iso8601(r.at, tz)},
                       {"reread_ids", r.reread_ids},
                       {"unread_before_ids", r.unread_before_ids}});
  }
  j["renames"] = renames;
  ordered_json planted = ordered_json::array();
  for (const auto& p : t.planted) {
    planted.push_back({{"template_id", p.template_id},
                       {"variant_id", p.variant_id},
                       {"message_id", p.message_id},
                       {"label", std::string(misinfo::to_string(p.label))}});
  }
  j["planted"] = planted;
  j["missing_parent_replies"] = t.missing_parent_replies;
  j["keyword"] = {{"word", config.keyword}, {"spike_date", format_date(t.keyword_spike_date)}};
  ordered_json msgs = ordered_json::array();
  for (const auto& tm : t.messages) {
    const Message& m = tm.message;
    msgs.push_back({{"id", m.id},
                    {"group_uid", m.group_uid},
                    {"sender", m.sender.e164},
                    {"sent_time", format_iso8601_minutes(m.sent_time, tz)},
                    {"kind", std::string(to_string(m.kind))},
                    {"reply_to", m.reply_to ? ordered_json(*m.reply_to) : ordered_json(nullptr)}});
  }
  j["messages"] = msgs;
  return j.dump(1) + "\n";
}

void write_generated(const Generated& g, const GenConfig& config, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "logs");
  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
  };
  for (const auto& [server, lines] : g.logs) {
    auto out = open(fs::path(dir) / "logs" / ("server_" + server + ".jsonl"));
    for (const auto& l : lines) out << l << '\n';
  }
  open(fs::path(dir) / "ground_truth.json") << ground_truth_json(g, config);
  {
    auto out = open(fs::path(dir) / "labeled_corpus.jsonl");
    g.labeled.write(out);
  }
  {
    auto out = open(fs::path(dir) / "truth_labels.csv");
    csv::Writer w(out);
    w.header({"message_id", "label", "template_id", "variant_id"});
    for (const auto& p : g.truth.planted) {
      w << p.message_id << misinfo::to_string(p.label) << p.template_id << p.variant_id;
      w.end_row();
    }
  }
  open(fs::path(dir) / "config.json") << config.to_json_text() << '\n';
}

}  // namespace chatlens::synth
