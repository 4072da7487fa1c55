#include "futmc/json_io.hpp"

#include <json.hpp>

#include <sstream>

namespace futmc {

using nlohmann::json;

namespace {

Mode parse_mode(const std::string& s) {
  if (s == "rlx") return Mode::Rlx;
  if (s == "rel") return Mode::Rel;
  if (s == "acq") return Mode::Acq;
  if (s == "ra") return Mode::RelAcq;
  throw FormatError("unknown mode '" + s + "'");
}

}  // namespace

FutureSet load_futures_json(const std::string& text, const Program& prog) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed futures file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("events") || !doc.contains("futures"))
    throw FormatError("futures file must contain 'events' and 'futures'");

  auto idx = label_index(prog);
  auto lab = std::make_shared<Labeling>();
  for (const auto& ev : doc["events"]) {
    int id = ev.at("id").get<int>();
    int thread = ev.at("thread").get<int>();
    const auto& l = ev.at("label");
    std::string kind = l.at("kind").get<std::string>();
    std::string line = l.at("line").get<std::string>();
    auto it = idx.find(line);
    if (it == idx.end())
      throw FormatError("event " + std::to_string(id) + " references unknown line '" + line + "'");
    const Atomic& cmd = it->second.second;
    Action a;
    if (kind == "R") {
      if (cmd.kind != AtomKind::Load) throw FormatError("line '" + line + "' is not a load");
      a = Action::read(line, l.at("var").get<std::string>(), l.at("rval").get<Val>(), cmd.acquire);
    } else if (kind == "W") {
      if (cmd.kind != AtomKind::Store) throw FormatError("line '" + line + "' is not a store");
      a = Action::write(line, l.at("var").get<std::string>(), l.at("wval").get<Val>(), cmd.release);
    } else if (kind == "U") {
      if (cmd.kind != AtomKind::Update) throw FormatError("line '" + line + "' is not an update");
      a = Action::update(line, l.at("var").get<std::string>(), l.at("rval").get<Val>(),
                         l.at("wval").get<Val>());
    } else if (kind == "A") {
      if (cmd.kind != AtomKind::RegAssign)
        throw FormatError("line '" + line + "' is not a register assignment");
      a = Action::silent(line);
    } else {
      throw FormatError("unknown event kind '" + kind + "'");
    }
    if (l.contains("mode")) a.mode = parse_mode(l.at("mode").get<std::string>());
    if (lab->entries.count(id)) throw FormatError("duplicate event id " + std::to_string(id));
    lab->entries[id] = Labeling::Entry{thread, std::move(a)};
  }

  FutureSet fs;
  fs.lab = lab;
  for (const auto& jf : doc["futures"]) {
    Future f;
    for (int id : jf.at("events").get<std::vector<int>>()) {
      if (!lab->entries.count(id))
        throw FormatError("future references undeclared event " + std::to_string(id));
      f.events.insert(id);
    }
    if (jf.contains("order"))
      for (const auto& e : jf.at("order")) {
        int x = e.at(0).get<int>(), y = e.at(1).get<int>();
        if (!f.events.count(x) || !f.events.count(y))
          throw FormatError("order edge outside the future's events");
        f.order.insert(x, y);
      }
    f.order = f.order.transitive_closure();
    if (!f.order.irreflexive()) throw FormatError("cyclic order in future");
    fs.futures.push_back(std::move(f));
  }
  fs.canonicalize();
  return fs;
}

std::string dump_futures_json(const FutureSet& fs) {
  json events = json::array();
  for (const auto& [id, e] : fs.lab->entries) {
    json l;
    l["kind"] = kind_str(e.act.kind);
    l["line"] = e.act.line;
    if (e.act.kind != ActKind::Silent) {
      l["var"] = e.act.var;
      if (e.act.is_read()) l["rval"] = e.act.rval;
      if (e.act.is_write()) l["wval"] = e.act.wval;
      l["mode"] = mode_str(e.act.mode);
    }
    events.push_back(json{{"id", id}, {"thread", e.thread}, {"label", l}});
  }
  json futures = json::array();
  for (const auto& f : fs.futures) {
    json jf;
    jf["events"] = f.events;
    json order = json::array();
    for (const auto& [x, y] : f.order.pairs()) order.push_back(json::array({x, y}));
    jf["order"] = order;
    futures.push_back(jf);
  }
  json doc{{"events", events}, {"futures", futures}};
  return doc.dump(2) + "\n";
}

std::string dump_graph_json(const Graph& g) {
  json events = json::array();
  for (const auto& ta : g.actions) {
    json row = json::array();
    row.push_back(ta.tag);
    row.push_back(kind_str(ta.act.kind));
    row.push_back(ta.act.line);
    row.push_back(ta.act.var);
    row.push_back(ta.act.is_read() ? json(ta.act.rval) : json(nullptr));
    row.push_back(ta.act.is_write() ? json(ta.act.wval) : json(nullptr));
    row.push_back(mode_str(ta.act.mode));
    row.push_back(ta.tid);
    events.push_back(row);
  }
  auto rel = [](const Rel& r) {
    json out = json::array();
    for (const auto& [a, b] : r.pairs()) out.push_back(json::array({a, b}));
    return out;
  };
  json doc{{"events", events}, {"sb", rel(g.sb)}, {"rf", rel(g.rf)}, {"mo", rel(g.mo)}};
  return doc.dump(2) + "\n";
}

std::string render_outcomes_json(const ExploreResult& res) {
  json outs = json::array();
  for (const auto& o : res.outcomes) {
    json regs;
    for (const auto& [t, rho] : o.registers) {
      json r;
      for (const auto& [k, v] : rho) r[k] = v;
      regs[std::to_string(t)] = r;
    }
    json finals;
    for (const auto& [v, n] : o.finals) finals[v] = n;
    json w = json::array();
    std::istringstream in(o.witness);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) w.push_back(line);
    outs.push_back(json{{"memory", finals}, {"registers", regs}, {"witness", w}});
  }
  json doc{{"outcomes", outs},
           {"states", res.states},
           {"transitions", res.transitions}};
  return doc.dump(2) + "\n";
}

std::string render_outcomes_table(const ExploreResult& res) {
  std::ostringstream os;
  os << res.outcomes.size() << " outcome(s), " << res.states << " state(s), "
     << res.transitions << " transition(s)\n";
  int i = 0;
  for (const auto& o : res.outcomes) {
    os << "#" << ++i << " ";
    bool first = true;
    for (const auto& [t, rho] : o.registers)
      for (const auto& [r, v] : rho) {
        if (!first) os << " ";
        os << r << "=" << v;
        first = false;
      }
    os << "  |";
    for (const auto& [v, n] : o.finals) os << " " << v << "=" << n;
    os << "\n";
    std::istringstream in(o.witness);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) os << "    " << line << "\n";
  }
  return os.str();
}

}  // namespace futmc
