#include "hroa/bm_codec.hpp"
#include "hroa/error.hpp"
#include "hroa/hybrid.hpp"
#include "hroa/level_opt.hpp"
#include "hroa/ml_codec.hpp"
#include "hroa/report.hpp"
#include "hroa/rtr_wire.hpp"
#include "hroa/synthetic.hpp"
#include "hroa/workload.hpp"

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace hroa;

namespace {

py::int_ to_py(u128 v) {
  py::int_ hi(static_cast<std::uint64_t>(v >> 64));
  py::int_ lo(static_cast<std::uint64_t>(v));
  return py::reinterpret_steal<py::int_>(
      PyNumber_Or(PyNumber_Lshift(hi.ptr(), py::int_(64).ptr()), lo.ptr()));
}

Family family_of(int f) {
  if (f == 4)
    return Family::v4;
  if (f == 6)
    return Family::v6;
  throw py::value_error("family must be 4 or 6");
}

Prefix as_prefix(const py::handle &h) {
  if (py::isinstance<Prefix>(h))
    return h.cast<Prefix>();
  return parse_prefix(h.cast<std::string>());
}

PrefixSet as_prefix_set(const py::iterable &items) {
  PrefixSet s;
  for (auto h : items)
    s.insert(as_prefix(h));
  return s;
}

py::set to_py_set(const PrefixSet &s) {
  py::set out;
  for (const auto &p : s)
    out.add(py::cast(p.to_string()));
  return out;
}

py::object to_py_json(const nlohmann::json &j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

rtr::Bytes to_bytes(const py::bytes &b) {
  const std::string s = b;
  return rtr::Bytes(s.begin(), s.end());
}

} // namespace

PYBIND11_MODULE(_hroa, m) {
  m.doc() = "Bitmap and maxLength encodings of route origin authorizations";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<WireError>(m, "WireError", base.ptr());
  auto proto = py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());
  py::register_exception<ErrorReportReceived>(m, "ErrorReportReceived", proto.ptr());

  py::class_<Prefix>(m, "Prefix")
      .def(py::init([](const std::string &text) { return parse_prefix(text); }), py::arg("text"))
      .def_property_readonly("family", [](const Prefix &p) { return static_cast<int>(p.family()); })
      .def_property_readonly("length", &Prefix::length)
      .def_property_readonly("bits", [](const Prefix &p) { return to_py(p.bits()); })
      .def("covers", [](const Prefix &a, const py::handle &b) { return covers(a, as_prefix(b)); })
      .def("__str__", &Prefix::to_string)
      .def("__repr__", [](const Prefix &p) { return "Prefix('" + p.to_string() + "')"; })
      .def("__hash__", [](const Prefix &p) { return PrefixHash{}(p); })
      .def(py::self == py::self)
      .def(py::self < py::self);

  py::class_<AddressBlock>(m, "AddressBlock")
      .def(py::init([](const py::handle &prefix, std::optional<int> max_length) {
             const Prefix p = as_prefix(prefix);
             return AddressBlock(p, max_length.value_or(p.length()));
           }),
           py::arg("prefix"), py::arg("max_length") = py::none())
      .def_property_readonly("prefix", &AddressBlock::prefix)
      .def_property_readonly("max_length", &AddressBlock::max_length)
      .def_property_readonly("height", &AddressBlock::height)
      .def("expand", [](const AddressBlock &b, int cap) { return to_py_set(expand(b, cap)); },
           py::arg("cap") = kDefaultExpansionCap)
      .def("__str__", &AddressBlock::to_string)
      .def("__repr__", [](const AddressBlock &b) { return "AddressBlock('" + b.to_string() + "')"; })
      .def(py::self == py::self);

  py::class_<HangingLevels>(m, "HangingLevels")
      .def(py::init([](int family, std::vector<int> levels) {
             return HangingLevels(family_of(family), std::move(levels));
           }),
           py::arg("family"), py::arg("levels"))
      .def_static("default", [](int f) { return HangingLevels::default_for(family_of(f)); })
      .def_static("multiples", [](int f, int step) { return HangingLevels::multiples(family_of(f), step); })
      .def_static("completed",
                  [](int f, std::vector<int> anchors, int h_max) {
                    return HangingLevels::completed(family_of(f), std::move(anchors), h_max);
                  },
                  py::arg("family"), py::arg("anchors"), py::arg("h_max") = kDefaultMaxGap)
      .def_property_readonly("family", [](const HangingLevels &l) { return static_cast<int>(l.family()); })
      .def_property_readonly("levels", &HangingLevels::levels)
      .def("nearest", &HangingLevels::nearest)
      .def("subtree_height", &HangingLevels::subtree_height)
      .def("max_height", &HangingLevels::max_height)
      .def("__repr__", [](const HangingLevels &l) { return "HangingLevels(" + to_json(l).dump() + ")"; })
      .def(py::self == py::self);

  py::class_<SubTreeBlock>(m, "SubTreeBlock")
      .def_property_readonly("id", [](const SubTreeBlock &b) { return to_py(b.id.value); })
      .def_property_readonly("family", [](const SubTreeBlock &b) { return static_cast<int>(b.id.family); })
      .def_property_readonly("level", [](const SubTreeBlock &b) { return b.id.level(); })
      .def_property_readonly("root", [](const SubTreeBlock &b) { return b.id.root(); })
      .def_readonly("bitmap", &SubTreeBlock::bitmap)
      .def_readonly("height", &SubTreeBlock::height)
      .def_property_readonly("withdraw", &SubTreeBlock::withdraw)
      .def("__repr__", [](const SubTreeBlock &b) {
        std::ostringstream o;
        o << "SubTreeBlock(root=" << b.id.root().to_string() << ", bitmap=" << b.bitmap
          << ", height=" << b.height << ")";
        return o.str();
      });

  m.def("subtree_id", [](const py::handle &p, int level) { return to_py(make_subtree_id(as_prefix(p), level).value); },
        py::arg("prefix"), py::arg("level"));
  m.def("node_number", [](const py::handle &p, int level, int height) {
          return make_node_number(as_prefix(p), level, height);
        },
        py::arg("prefix"), py::arg("level"), py::arg("height"));
  m.def("encode_batch",
        [](const HangingLevels &cfg, const py::iterable &prefixes, bool withdraw) {
          return encode_batch(cfg, as_prefix_set(prefixes), withdraw);
        },
        py::arg("levels"), py::arg("prefixes"), py::arg("withdraw") = false);
  m.def("decode_blocks",
        [](const HangingLevels &cfg, const std::vector<SubTreeBlock> &blocks) {
          return to_py_set(decode_blocks(cfg, blocks));
        },
        py::arg("levels"), py::arg("blocks"));
  m.def("compress_minimal", [](const py::iterable &p) { return compress_minimal(as_prefix_set(p)); },
        py::arg("prefixes"));
  m.def("scatter_degree", [](const py::iterable &p) { return scatter_degree(as_prefix_set(p)).value(); },
        py::arg("prefixes"));

  py::class_<HybridConfig>(m, "HybridConfig")
      .def(py::init([](py::object threshold, bool aggregate, std::optional<HangingLevels> v4,
                       std::optional<HangingLevels> v6) {
             HybridConfig c;
             if (!threshold.is_none())
               c.delta_l_threshold = threshold.cast<int>();
             c.aggregate = aggregate;
             if (v4)
               c.v4 = *v4;
             if (v6)
               c.v6 = *v6;
             c.validate();
             return c;
           }),
           py::arg("threshold") = 3, py::arg("aggregate") = false, py::arg("v4") = py::none(),
           py::arg("v6") = py::none())
      .def_property_readonly("threshold", [](const HybridConfig &c) -> py::object {
        if (c.delta_l_threshold == kNeverMaxLength)
          return py::none();
        return py::int_(c.delta_l_threshold);
      })
      .def_readonly("aggregate", &HybridConfig::aggregate)
      .def_readonly("v4", &HybridConfig::v4)
      .def_readonly("v6", &HybridConfig::v6);

  py::class_<Workload>(m, "Workload")
      .def_static("from_csv", &Workload::read_csv_file, py::arg("path"))
      .def_static("from_rows",
                  [](const std::vector<std::tuple<std::uint32_t, std::string, std::optional<int>>> &rows) {
                    std::vector<Vrp> vrps;
                    for (const auto &[asn, text, ml] : rows) {
                      const Prefix p = parse_prefix(text);
                      vrps.push_back(Vrp{asn, AddressBlock(p, ml.value_or(p.length()))});
                    }
                    return Workload::from_vrps(vrps);
                  },
                  py::arg("rows"))
      .def_static("synthetic_scattered", &scattered_workload, py::arg("prefixes"), py::arg("seed") = 1)
      .def_static("synthetic_mixed", &mixed_workload, py::arg("rows"), py::arg("seed") = 1)
      .def_property_readonly("row_count", &Workload::row_count)
      .def_property_readonly("asns", [](const Workload &w) {
        std::vector<std::uint32_t> out;
        for (const auto &[asn, r] : w.rows)
          out.push_back(asn);
        return out;
      })
      .def("authorizations", [](const Workload &w) {
        py::dict d;
        for (const auto &[asn, s] : w.authorizations())
          d[py::int_(asn)] = to_py_set(s);
        return d;
      })
      .def("stats", [](const Workload &w, bool as0) { return to_py_json(workload_stats(w, as0)); },
           py::arg("include_as0") = false);

  m.def("encode",
        [](const Workload &w, const std::string &scheme, std::optional<HybridConfig> cfg, unsigned jobs) {
          const auto s = parse_scheme(scheme);
          const HybridConfig c = cfg.value_or(HybridConfig{});
          EncodeResult r;
          {
            py::gil_scoped_release release;
            r = encode_workload(w, s, c, jobs);
          }
          rtr::Bytes bytes;
          for (const auto &p : r.pdus)
            rtr::serialize(p, bytes);
          py::dict out = to_py_json(encode_record(w, s, r));
          out["data"] = py::bytes(reinterpret_cast<const char *>(bytes.data()), bytes.size());
          return out;
        },
        py::arg("workload"), py::arg("scheme") = "hroa", py::arg("config") = py::none(),
        py::arg("jobs") = 1);

  m.def("decode",
        [](const py::bytes &data, std::optional<HybridConfig> cfg) {
          const auto pdus = rtr::deserialize_all(to_bytes(data));
          py::dict d;
          for (const auto &[asn, s] : decode_pdus(pdus, cfg.value_or(HybridConfig{})))
            d[py::int_(asn)] = to_py_set(s);
          return d;
        },
        py::arg("data"), py::arg("config") = py::none());

  m.def("pdu_types", [](const py::bytes &data) {
    std::vector<int> out;
    for (const auto &p : rtr::deserialize_all(to_bytes(data)))
      out.push_back(p.type());
    return out;
  });

  m.def("optimize_levels",
        [](const py::iterable &prefixes, int h_max) {
          const auto s = as_prefix_set(prefixes);
          const std::vector<Prefix> v(s.begin(), s.end());
          auto r = optimize_levels(v, {}, h_max);
          return py::make_tuple(r.levels, r.cost);
        },
        py::arg("prefixes"), py::arg("h_max") = kDefaultMaxGap);

  m.def("simulated_cost",
        [](const py::iterable &prefixes, const HangingLevels &levels) {
          const auto s = as_prefix_set(prefixes);
          const std::vector<Prefix> v(s.begin(), s.end());
          return simulated_cost(v, levels);
        },
        py::arg("prefixes"), py::arg("levels"));

  m.def("sweep",
        [](const Workload &w, const std::vector<py::object> &thresholds, const std::vector<int> &multiples,
           bool aggregate) {
          std::vector<int> ts;
          for (const auto &t : thresholds)
            ts.push_back(t.is_none() ? kNeverMaxLength : t.cast<int>());
          return to_py_json(to_json(sweep_parameters(w, ts, multiples, aggregate)));
        },
        py::arg("workload"), py::arg("thresholds"), py::arg("multiples"), py::arg("aggregate") = false);

}
