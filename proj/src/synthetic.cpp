#include "codepurify/synthetic.hpp"

#include <array>
#include <string_view>
#include <vector>

#include "codepurify/error.hpp"
#include "codepurify/random.hpp"

namespace codepurify {
namespace {

// Statement count per method is geometric: stop after each statement with this probability.
constexpr double kStopProbability = 0.7;
constexpr std::size_t kMaxStatements = 12;
// A method usually ends on a block followed by one plain statement; an n-gram model cannot
// track brace depth, so a lone "}" before the final statement reads as unnatural otherwise.
constexpr double kBlockBeforeTail = 0.9;

constexpr std::array<std::string_view, 333> kNouns = {
    "User", "Name", "File", "Buffer", "Config", "Index", "Count", "Size", "Item", "Node",
    "Path", "Line", "Data", "Result", "Total", "Offset", "Length", "Text", "Hex", "Id", "Token", "Message",
    "Stream", "Record", "Order", "Price", "Account", "Session", "Request", "Response", "Header",
    "Cache", "Query", "Table", "Column", "Row", "Event", "Task", "Job", "Queue", "Status", "Error", "Date",
    "Score", "Group", "Level", "Port", "Host", "Url", "Member", "Product", "Customer", "Payment",
    "Report", "Image", "Page", "Field", "Source", "Address", "Agent", "Alarm", "Album", "Amount", "Angle",
    "Answer", "Archive", "Area", "Asset", "Attempt", "Author", "Badge", "Balance", "Bank", "Batch",
    "Bean", "Block", "Body", "Bonus", "Book", "Border", "Bound", "Box", "Branch", "Brand", "Bucket", "Budget",
    "Bundle", "Button", "Byte", "Call", "Camera", "Card", "Cart", "Category", "Cell", "Center",
    "Channel", "Chapter", "Char", "Chart", "Check", "Child", "Circle", "City", "Client", "Clock", "Code",
    "Color", "Command", "Comment", "Company", "Component", "Condition", "Connection", "Contact", "Content",
    "Context", "Contract", "Cookie", "Counter", "Country", "Course", "Credit", "Crop", "Currency", "Cursor",
    "Curve", "Cycle", "Database", "Day", "Deadline", "Delay", "Delta", "Depth", "Device", "Dialog", "Digest",
    "Dimension", "Directory", "Discount", "Disk", "Document", "Domain", "Draft", "Driver", "Edge", "Element",
    "Email", "Employee", "Encoder", "Engine", "Factor", "Feature", "Feed", "Filter", "Flag", "Folder", "Font",
    "Form", "Format", "Frame", "Friend", "Gateway", "Graph", "Grid", "Guest", "Handler", "Height",
    "Hint", "History", "Hour", "Icon", "Identity", "Input", "Instance", "Interval", "Invoice", "Issue",
    "Journal", "Label", "Language", "Layer", "Layout", "Lease", "Ledger", "Lesson", "Library", "License",
    "Limit", "Link", "Locale", "Location", "Lock", "Log", "Loop", "Manager", "Margin", "Marker", "Match",
    "Matrix", "Measure", "Media", "Menu", "Meta", "Method", "Metric", "Minute", "Mode", "Model", "Module",
    "Month", "Mount", "Note", "Notice", "Option", "Owner", "Package", "Packet", "Pair", "Panel", "Parameter",
    "Parent", "Part", "Partner", "Password", "Pattern", "Peer", "Percent", "Period", "Permission", "Phase",
    "Phone", "Photo", "Pixel", "Place", "Plan", "Player", "Plugin", "Point", "Policy", "Pool", "Position",
    "Post", "Prefix", "Profile", "Project", "Property", "Provider", "Proxy", "Quota", "Range", "Rank", "Rate",
    "Ratio", "Reader", "Reason", "Receipt", "Region", "Registry", "Rule", "Sample", "Scale", "Schema", "Scope",
    "Screen", "Script", "Section", "Sector", "Seed", "Segment", "Selector", "Sender", "Sequence", "Server",
    "Service", "Setting", "Shape", "Share", "Sheet", "Shift", "Signal", "Slot", "Snapshot", "Socket", "Sound",
    "Space", "Speed", "Stage", "Step", "Stock", "Store", "Story", "Style", "Subject", "Suffix",
    "Summary", "Supplier", "Survey", "Switch", "Symbol", "Tag", "Target", "Team", "Template", "Tenant", "Term",
    "Threshold", "Ticket", "Tier", "Title", "Topic", "Track", "Trade", "Transfer", "Trigger",
    "Unit", "Update", "Upload", "Usage", "Vector", "Vendor", "Version", "View", "Visit", "Volume", "Vote",
    "Wallet", "Weight", "Widget", "Window", "Worker", "Year", "Zone"};

constexpr std::array<std::string_view, 40> kGetVerbs = {
    "get",     "find",    "load",   "fetch",    "read",    "resolve",  "lookup",  "build",   "create",  "compute",
    "format",  "parse",   "extract", "generate", "select",  "query",    "collect", "derive",  "obtain",  "locate",
    "retrieve", "calculate", "assemble", "produce", "pick",  "choose",   "acquire", "decode",  "render",  "estimate",
    "measure", "search",  "scan",   "import",   "convert", "normalize", "translate", "compose", "detect", "infer"};

constexpr std::array<std::string_view, 10> kBoolVerbs = {
    "check", "validate", "verify", "is", "has", "can", "contains", "matches", "accept", "ensure"};

constexpr std::array<std::string_view, 120> kVoidVerbs = {
    "set", "write", "save", "update", "remove", "add", "open", "close", "handle", "process", "convert", "init",
    "reset", "apply", "merge", "split", "sort", "filter", "send", "store", "count", "allocate", "append",
    "assign", "attach", "bind", "cancel", "capture", "clear", "collect", "commit", "compare", "compress",
    "configure", "connect", "copy", "decode", "delete", "deploy", "detect", "dispatch", "drain", "emit",
    "enable", "encode", "enqueue", "evaluate", "execute", "expand", "export", "flush", "grant", "group", "hide",
    "import", "index", "insert", "install", "invoke", "join", "launch", "list", "lock", "log", "map", "mark",
    "measure", "migrate", "modify", "mount", "move", "notify", "observe", "pack", "patch", "pause", "poll",
    "prepare", "print", "publish", "push", "queue", "rank", "receive", "record", "refresh", "register",
    "release", "reload", "render", "repair", "replace", "report", "request", "restore", "resume", "revoke",
    "rotate", "route", "scan", "schedule", "search", "serialize", "show", "skip", "start", "stop", "submit",
    "subscribe", "suspend", "sync", "track", "transform", "trim", "unlock", "unpack", "upload", "visit", "wait",
    "wrap"};

constexpr std::array<std::string_view, 20> kIntNames = {
    "count", "size", "index", "total", "offset", "length", "limit", "retries", "attempts", "position", "width",
    "height", "depth", "capacity", "port", "level", "step", "remaining", "start", "end"};

constexpr std::array<std::string_view, 9> kLongNames = {
    "timestamp", "elapsed", "deadline", "duration", "bytes", "millis", "version", "sequence", "checksum"};

constexpr std::array<std::string_view, 11> kBoolNames = {
    "found", "valid", "enabled", "done", "ready", "changed", "empty", "active", "success", "visible", "dirty"};

constexpr std::array<std::string_view, 10> kDoubleNames = {
    "ratio", "rate", "average", "weight", "price", "amount", "factor", "scale", "score", "threshold"};

constexpr std::array<std::string_view, 16> kStringNames = {
    "name", "text", "message", "key", "path", "value", "line", "prefix", "label", "title", "url", "host", "id",
    "code", "type", "format"};

constexpr std::array<std::string_view, 12> kListNames = {
    "names", "items", "lines", "values", "keys", "paths", "tokens", "parts", "results", "entries", "rows",
    "ids"};

constexpr std::array<std::string_view, 8> kMapNames = {
    "counts", "index", "cache", "scores", "sizes", "totals", "lookup", "positions"};

constexpr std::array<std::string_view, 4> kBuilderNames = {
    "sb", "builder", "buffer", "out"};

constexpr std::array<std::string_view, 6> kEntityNames = {
    "existing", "current", "other", "target", "result", "candidate"};

constexpr std::array<std::string_view, 5> kHelpers = {"this", "helper", "client", "context", "registry"};
constexpr std::array<std::string_view, 12> kOwners = {"repository", "service", "cache",    "store",   "dao",     "manager",
                                                      "provider",   "gateway", "resolver", "catalog", "tracker", "backend"};
constexpr std::array<std::string_view, 16> kNumbers = {"0",  "1",  "2",   "3",   "5",   "8",   "10",   "16",
                                                       "32", "64", "100", "128", "255", "256", "1000", "1024"};
constexpr std::array<std::string_view, 3> kCaught = {"IOException", "IllegalStateException", "NumberFormatException"};

enum class Type { Int, Long, Bool, Double, Str, StrList, StrIntMap, Builder, Entity };

std::string lower_first(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'A' && out[0] <= 'Z') out[0] = static_cast<char>(out[0] - 'A' + 'a');
  return out;
}

std::string upper_first(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

// "userCount" -> "user count"
std::string spoken(std::string_view name) {
  std::string out;
  for (const char c : name) {
    if (c >= 'A' && c <= 'Z') {
      if (!out.empty()) out += ' ';
      out += static_cast<char>(c - 'A' + 'a');
    } else {
      out += c;
    }
  }
  return out;
}

struct Variable {
  std::string name;
  Type type;
};

class MethodWriter {
 public:
  explicit MethodWriter(Rng& rng) : rng_(rng) {}

  std::string write() {
    topic_ = std::string(rng_.pick(kNouns));
    owner_ = std::string(rng_.pick(kOwners));

    const double kind = rng_.unit();
    if (kind < 0.3) {
      has_return_ = false;
    } else {
      has_return_ = true;
      const std::array<Type, 10> returns = {Type::Int,  Type::Str,    Type::Bool,   Type::StrList, Type::Entity,
                                            Type::Long, Type::Double, Type::Entity, Type::Str,     Type::Int};
      return_type_ = rng_.pick(returns);
    }
    if (!has_return_) {
      verb_ = std::string(rng_.pick(kVoidVerbs));
    } else if (return_type_ == Type::Bool) {
      verb_ = std::string(rng_.pick(kBoolVerbs));
    } else {
      verb_ = std::string(rng_.pick(kGetVerbs));
    }

    if (rng_.chance(0.1)) line("@Override");

    const double m = rng_.unit();
    std::string header = m < 0.6 ? "public" : m < 0.9 ? "private" : "protected";
    header += " ";
    header += has_return_ ? type_name(return_type_) : "void";
    header += " " + verb_ + topic_ + "(";

    const std::size_t params = rng_.below(4);
    for (std::size_t i = 0; i < params; ++i) {
      const Type t = i == 0 && rng_.chance(0.5) ? (rng_.chance(0.5) ? Type::Entity : Type::Str) : random_type();
      const std::string name = fresh_name(t);
      if (i > 0) header += ", ";
      header += type_name(t) + " " + name;
      vars_.push_back({name, t});
    }
    header += ")";
    if (rng_.chance(0.15)) header += " throws IOException";
    header += " {";
    line(header);

    ++depth_;
    std::size_t statements = 1;
    while (statements < kMaxStatements && !rng_.chance(kStopProbability)) ++statements;
    // The tail statement is the return line, or for void methods the last body statement.
    const std::size_t tail = has_return_ ? statements : statements - 1;
    for (std::size_t i = 0; i < statements; ++i) {
      if (vars_.empty()) {
        statement(true);
      } else if (i == tail) {
        plain_statement();
      } else if (i + 1 == tail && rng_.chance(kBlockBeforeTail)) {
        block_statement();
      } else {
        statement(true);
      }
    }
    if (has_return_) line("return " + expression(return_type_) + ";");
    --depth_;
    line("}");
    return out_;
  }

 private:
  void line(const std::string& text) {
    out_.append(static_cast<std::size_t>(depth_) * 4, ' ');
    out_ += text;
    out_ += '\n';
  }

  std::string type_name(Type t) const {
    switch (t) {
      case Type::Int: return "int";
      case Type::Long: return "long";
      case Type::Bool: return "boolean";
      case Type::Double: return "double";
      case Type::Str: return "String";
      case Type::StrList: return "List<String>";
      case Type::StrIntMap: return "Map<String, Integer>";
      case Type::Builder: return "StringBuilder";
      case Type::Entity: return topic_;
    }
    return "Object";
  }

  std::string number() {
    if (rng_.chance(0.15)) return std::to_string(rng_.below(500));
    return std::string(rng_.pick(kNumbers));
  }

  Type random_type() {
    const std::array<Type, 12> types = {Type::Int,     Type::Int,       Type::Str,    Type::Str,
                                        Type::Bool,    Type::StrList,   Type::StrIntMap, Type::Long,
                                        Type::Double,  Type::Builder,   Type::Entity, Type::Entity};
    return rng_.pick(types);
  }

  std::string base_name(Type t) {
    switch (t) {
      case Type::Int: return std::string(rng_.pick(kIntNames));
      case Type::Long: return std::string(rng_.pick(kLongNames));
      case Type::Bool: return std::string(rng_.pick(kBoolNames));
      case Type::Double: return std::string(rng_.pick(kDoubleNames));
      case Type::Str: return std::string(rng_.pick(kStringNames));
      case Type::StrList: return std::string(rng_.pick(kListNames));
      case Type::StrIntMap: return std::string(rng_.pick(kMapNames));
      case Type::Builder: return std::string(rng_.pick(kBuilderNames));
      case Type::Entity: return std::string(rng_.pick(kEntityNames));
    }
    return "value";
  }

  bool taken(const std::string& name) const {
    if (name == "i" || name == "item" || name == "e" || name == "it") return true;
    for (const auto& v : vars_) {
      if (v.name == name) return true;
    }
    return false;
  }

  std::string fresh_name(Type t) {
    const std::string topic = lower_first(topic_);
    if (t == Type::Entity && !taken(topic)) return topic;
    for (int attempt = 0; attempt < 20; ++attempt) {
      std::string name = base_name(t);
      if (!taken(name)) return name;
    }
    return "value" + std::to_string(vars_.size());
  }

  const Variable* find(Type t) {
    std::vector<const Variable*> matches;
    for (const auto& v : vars_) {
      if (v.type == t) matches.push_back(&v);
    }
    return matches.empty() ? nullptr : matches[rng_.below(matches.size())];
  }

  const Variable* any_variable() { return vars_.empty() ? nullptr : &vars_[rng_.below(vars_.size())]; }

  std::string accessor(std::string_view prefix, Type t) { return std::string(prefix) + upper_first(base_name(t)) + "()"; }

  std::string expression(Type t) {
    if (const Variable* v = find(t); v != nullptr && rng_.chance(0.55)) return v->name;
    const Variable* entity = find(Type::Entity);
    const Variable* str = find(Type::Str);
    const Variable* list = find(Type::StrList);
    const Variable* map = find(Type::StrIntMap);
    const Variable* num = find(Type::Int);
    const double r = rng_.unit();
    switch (t) {
      case Type::Int:
        if (list != nullptr && r < 0.2) return list->name + ".size()";
        if (str != nullptr && r < 0.3) return str->name + ".length()";
        if (entity != nullptr && r < 0.45) return entity->name + "." + accessor("get", Type::Int);
        if (map != nullptr && str != nullptr && r < 0.55) return map->name + ".getOrDefault(" + str->name + ", 0)";
        if (num != nullptr && r < 0.7) return num->name + (rng_.chance(0.5) ? " + " : " - ") + number();
        if (str != nullptr && r < 0.75) return "Integer.parseInt(" + str->name + ")";
        return rng_.chance(0.15) ? "-1" : number();
      case Type::Long:
        if (entity != nullptr && r < 0.3) return entity->name + "." + accessor("get", Type::Long);
        if (r < 0.6) return "System.currentTimeMillis()";
        if (r < 0.75) return "System.nanoTime()";
        return "0L";
      case Type::Bool:
        if (str != nullptr && r < 0.2) return str->name + ".isEmpty()";
        if (list != nullptr && str != nullptr && r < 0.35) return list->name + ".contains(" + str->name + ")";
        if (map != nullptr && str != nullptr && r < 0.45) return map->name + ".containsKey(" + str->name + ")";
        if (entity != nullptr && r < 0.6) return entity->name + "." + accessor("is", Type::Bool);
        if (entity != nullptr && r < 0.7) return entity->name + " != null";
        if (num != nullptr && r < 0.8) return num->name + " > " + number();
        return rng_.chance(0.5) ? "false" : "true";
      case Type::Double:
        if (entity != nullptr && r < 0.3) return entity->name + "." + accessor("get", Type::Double);
        if (num != nullptr && r < 0.5) return "(double) " + num->name + " / " + number();
        if (const Variable* d = find(Type::Double); d != nullptr && r < 0.6) return "Math.abs(" + d->name + ")";
        return rng_.chance(0.5) ? "0.0" : "1.0";
      case Type::Str:
        if (str != nullptr && r < 0.15) return str->name + ".trim()";
        if (str != nullptr && r < 0.25) return str->name + (rng_.chance(0.5) ? ".toLowerCase()" : ".toUpperCase()");
        if (entity != nullptr && r < 0.45) return entity->name + "." + accessor("get", Type::Str);
        if (num != nullptr && r < 0.55) return "String.valueOf(" + num->name + ")";
        if (list != nullptr && r < 0.62) return "String.join(\",\", " + list->name + ")";
        if (list != nullptr && num != nullptr && r < 0.68) return list->name + ".get(" + num->name + ")";
        if (str != nullptr && num != nullptr && r < 0.75) return str->name + " + \"-\" + " + num->name;
        return "\"" + spoken(base_name(Type::Str)) + "\"";
      case Type::StrList:
        if (entity != nullptr && r < 0.25) return entity->name + "." + accessor("get", Type::StrList);
        if (list != nullptr && r < 0.4) return "new ArrayList<>(" + list->name + ")";
        if (r < 0.8) return "new ArrayList<>()";
        return "Collections.emptyList()";
      case Type::StrIntMap: return r < 0.7 ? "new HashMap<>()" : "new TreeMap<>()";
      case Type::Builder: return "new StringBuilder()";
      case Type::Entity:
        if (str != nullptr && r < 0.45) return owner_ + ".find" + topic_ + "(" + str->name + ")";
        if (r < 0.7) return "new " + topic_ + "()";
        if (r < 0.85) return owner_ + ".load" + topic_ + "()";
        return "null";
    }
    return "null";
  }

  // Call arguments stay flat: a variable of the right type, else a literal.
  std::string operand(Type t) {
    if (const Variable* v = find(t); v != nullptr) return v->name;
    switch (t) {
      case Type::Int: return number();
      case Type::Str: return "\"" + spoken(base_name(Type::Str)) + "\"";
      case Type::Bool: return rng_.chance(0.5) ? "true" : "false";
      case Type::Double: return "1.0";
      default: return expression(t);
    }
  }

  void declaration() {
    const Type t = random_type();
    const std::string init = expression(t);
    const std::string name = fresh_name(t);
    line(type_name(t) + " " + name + " = " + init + ";");
    vars_.push_back({name, t});
  }

  std::string failure_message() {
    const double r = rng_.unit();
    const std::string noun = spoken(topic_);
    if (r < 0.3) return "failed to " + verb_ + " " + noun;
    if (r < 0.55) return noun + " not found";
    if (r < 0.75) return "invalid " + noun;
    return "unable to " + verb_ + " " + noun;
  }

  void log_statement() {
    const Variable* v = any_variable();
    const double r = rng_.unit();
    const std::string noun = spoken(topic_);
    if (v != nullptr && r < 0.35) {
      line("LOG.debug(\"" + verb_ + " " + noun + " {}\", " + v->name + ");");
    } else if (v != nullptr && r < 0.6) {
      line("LOG.info(\"" + spoken(v->name) + ": \" + " + v->name + ");");
    } else if (v != nullptr && r < 0.75) {
      line("System.out.println(" + v->name + ");");
    } else {
      line("LOG.warn(\"" + failure_message() + "\");");
    }
  }

  std::string arguments() {
    std::string args;
    const std::size_t n = rng_.below(3);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) args += ", ";
      const Variable* v = any_variable();
      args += v != nullptr ? v->name : number();
    }
    return args;
  }

  void call_statement() {
    const Variable* list = find(Type::StrList);
    const Variable* map = find(Type::StrIntMap);
    const Variable* sb = find(Type::Builder);
    const Variable* entity = find(Type::Entity);
    const double r = rng_.unit();
    if (r < 0.15 && list != nullptr) {
      line(list->name + ".add(" + operand(Type::Str) + ");");
    } else if (r < 0.25 && map != nullptr) {
      const std::string key = operand(Type::Str);
      line(map->name + (rng_.chance(0.5) ? ".put(" : ".merge(") + key + ", " + operand(Type::Int) +
           (rng_.chance(0.5) ? ", Integer::sum" : "") + ");");
    } else if (r < 0.35 && sb != nullptr) {
      line(sb->name + ".append(" + operand(Type::Str) + ");");
    } else if (r < 0.5 && entity != nullptr) {
      line(entity->name + "." + "set" + upper_first(base_name(Type::Int)) + "(" + operand(Type::Int) + ");");
    } else if (r < 0.7) {
      line(owner_ + "." + std::string(rng_.pick(kVoidVerbs)) + "(" + (entity != nullptr ? entity->name : arguments()) + ");");
    } else {
      line(std::string(rng_.pick(kHelpers)) + "." + std::string(rng_.pick(kVoidVerbs)) + upper_first(base_name(random_type())) +
           "(" + arguments() + ");");
    }
  }

  void update_statement() {
    const Variable* v = find(Type::Int);
    if (v == nullptr) {
      declaration();
      return;
    }
    const double r = rng_.unit();
    if (r < 0.3) {
      line(v->name + " += " + expression(Type::Int) + ";");
    } else if (r < 0.5) {
      line(v->name + (rng_.chance(0.7) ? "++;" : "--;"));
    } else if (r < 0.7) {
      line(v->name + " = Math." + (rng_.chance(0.5) ? "max(" : "min(") + v->name + ", " + number() + ");");
    } else {
      line(v->name + " = " + expression(Type::Int) + ";");
    }
  }

  void guard_statement() {
    const Variable* v = any_variable();
    if (v == nullptr) {
      declaration();
      return;
    }
    const bool object = v->type == Type::Str || v->type == Type::StrList || v->type == Type::StrIntMap ||
                        v->type == Type::Builder || v->type == Type::Entity;
    if (v->type == Type::Str && rng_.chance(0.4)) {
      line("if (" + v->name + " == null || " + v->name + ".isEmpty()) {");
    } else if (object) {
      line("if (" + v->name + " == null) {");
    } else if (v->type == Type::Bool) {
      line("if (!" + v->name + ") {");
    } else {
      line("if (" + v->name + " < 0) {");
    }
    ++depth_;
    if (has_return_ && rng_.chance(0.5)) {
      line("return " + expression(return_type_) + ";");
    } else if (rng_.chance(0.75)) {
      const std::string_view ex = object ? "IllegalArgumentException" : "IllegalStateException";
      line("throw new " + std::string(ex) + "(\"" + spoken(v->name) + (object ? " must not be null" : " is invalid") +
           "\");");
    } else {
      line(has_return_ ? "return " + expression(return_type_) + ";" : "return;");
    }
    --depth_;
    line("}");
  }

  void branch_statement() {
    const Variable* v = find(Type::Int);
    if (v == nullptr) {
      declaration();
      return;
    }
    const std::array<std::string_view, 5> ops = {">", "<", ">=", "<=", "=="};
    line("if (" + v->name + " " + std::string(rng_.pick(ops)) + " " + number() + ") {");
    ++depth_;
    inner_statement();
    --depth_;
    if (rng_.chance(0.35)) {
      line("} else {");
      ++depth_;
      inner_statement();
      --depth_;
    }
    line("}");
  }

  void loop_statement() {
    const Variable* list = find(Type::StrList);
    const Variable* map = find(Type::StrIntMap);
    const double r = rng_.unit();
    if (list != nullptr && r < 0.5) {
      line("for (String item : " + list->name + ") {");
      ++depth_;
      vars_.push_back({"item", Type::Str});
      inner_statement();
      if (rng_.chance(0.4)) inner_statement();
      vars_.pop_back();
      --depth_;
      line("}");
      return;
    }
    if (map != nullptr && r < 0.65) {
      line("for (Map.Entry<String, Integer> entry : " + map->name + ".entrySet()) {");
      ++depth_;
      const Variable* num = find(Type::Int);
      if (num != nullptr) {
        line(num->name + " += entry.getValue();");
      } else {
        line("LOG.debug(\"{} = {}\", entry.getKey(), entry.getValue());");
      }
      --depth_;
      line("}");
      return;
    }
    const std::string bound = list != nullptr ? list->name + ".size()" : expression(Type::Int);
    line("for (int i = 0; i < " + bound + "; i++) {");
    ++depth_;
    vars_.push_back({"i", Type::Int});
    inner_statement();
    vars_.pop_back();
    --depth_;
    line("}");
  }

  void try_statement() {
    line("try {");
    ++depth_;
    call_statement();
    if (rng_.chance(0.4)) call_statement();
    --depth_;
    line("} catch (" + std::string(rng_.pick(kCaught)) + " e) {");
    ++depth_;
    const double r = rng_.unit();
    if (r < 0.35) {
      line("throw new RuntimeException(e);");
    } else if (r < 0.8) {
      line("LOG.error(\"" + failure_message() + "\", e);");
    } else {
      line("e.printStackTrace();");
    }
    --depth_;
    line("}");
  }

  void inner_statement() {
    const double r = rng_.unit();
    if (r < 0.35) {
      call_statement();
    } else if (r < 0.6) {
      update_statement();
    } else if (r < 0.8) {
      log_statement();
    } else {
      declaration();
    }
  }

  void plain_statement() {
    const double r = rng_.unit();
    if (r < 0.5) {
      call_statement();
    } else if (r < 0.75) {
      update_statement();
    } else {
      log_statement();
    }
  }

  void block_statement() {
    const double r = rng_.unit();
    if (r < 0.4) {
      guard_statement();
    } else if (r < 0.7) {
      branch_statement();
    } else {
      loop_statement();
    }
  }

  void statement(bool top) {
    const double r = rng_.unit();
    if (r < 0.26 || vars_.empty()) {
      declaration();
    } else if (r < 0.36) {
      log_statement();
    } else if (r < 0.52) {
      call_statement();
    } else if (r < 0.60) {
      update_statement();
    } else if (r < 0.70) {
      guard_statement();
    } else if (r < 0.78) {
      branch_statement();
    } else if (r < 0.90 && top) {
      loop_statement();
    } else if (top) {
      try_statement();
    } else {
      call_statement();
    }
  }

  Rng& rng_;
  std::string out_;
  int depth_ = 0;
  std::string topic_;
  std::string owner_;
  std::string verb_;
  bool has_return_ = false;
  Type return_type_ = Type::Int;
  std::vector<Variable> vars_;
};

}  // namespace

Dataset generate_corpus(const SyntheticOptions& options) {
  if (options.id_prefix.empty()) throw ConfigError("synthetic corpus needs a non-empty id prefix");
  Dataset d;
  d.provenance = "synthetic java-style corpus seed=" + std::to_string(options.seed);
  d.samples.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    Rng rng(mix_seed(options.seed, i));
    CodeSample s;
    s.id = options.id_prefix + "-" + std::to_string(i);
    s.code = MethodWriter(rng).write();
    d.samples.push_back(std::move(s));
  }
  return d;
}

}  // namespace codepurify
