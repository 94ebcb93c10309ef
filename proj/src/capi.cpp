#include "varsob/varsob.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "io.hpp"
#include "scenario.hpp"
#include "varsob/error.hpp"
#include "varsob/hajlasz.hpp"

struct varsob_space {
  varsob::MetricMeasureSpace space;
};

namespace {

thread_local std::string last_error;

varsob_status set_error(varsob_status status, const std::string& message) {
  last_error = message;
  return status;
}

varsob_status map_error(varsob::ErrorCode code) {
  switch (code) {
    case varsob::ErrorCode::invalid_argument: return VARSOB_INVALID_ARGUMENT;
    case varsob::ErrorCode::domain: return VARSOB_DOMAIN;
    case varsob::ErrorCode::parse: return VARSOB_PARSE;
    case varsob::ErrorCode::io: return VARSOB_IO;
  }
  return VARSOB_INTERNAL;
}

template <class F>
varsob_status guarded(F&& f) {
  try {
    f();
    return VARSOB_OK;
  } catch (const varsob::Error& e) {
    return set_error(map_error(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(VARSOB_PARSE, std::string("malformed input: ") + e.what());
  } catch (const std::bad_alloc&) {
    return set_error(VARSOB_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(VARSOB_INTERNAL, e.what());
  } catch (...) {
    return set_error(VARSOB_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require_ptr(const void* p, const char* what) {
  if (!p) varsob::fail(varsob::ErrorCode::invalid_argument, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* varsob_version(void) { return "0.1.0"; }

const char* varsob_last_error(void) { return last_error.c_str(); }

void varsob_string_free(char* s) { std::free(s); }

varsob_status varsob_space_from_json(const char* json, varsob_space** out) {
  return guarded([&] {
    require_ptr(json, "json");
    require_ptr(out, "out");
    *out = new varsob_space{varsob::io::space_from_json(varsob::io::parse(json))};
  });
}

varsob_status varsob_space_generate(const char* params_json, varsob_space** out) {
  return guarded([&] {
    require_ptr(params_json, "params_json");
    require_ptr(out, "out");
    *out = new varsob_space{varsob::scenario::generate_space(varsob::io::parse(params_json))};
  });
}

varsob_status varsob_space_to_json(const varsob_space* space, char** out_json) {
  return guarded([&] {
    require_ptr(space, "space");
    require_ptr(out_json, "out_json");
    *out_json = copy_string(varsob::io::dump(varsob::io::space_to_json(space->space)));
  });
}

size_t varsob_space_size(const varsob_space* space) { return space ? space->space.size() : 0; }

void varsob_space_free(varsob_space* space) { delete space; }

varsob_status varsob_luxemburg(const varsob_space* space, const double* u, const double* p, double tol,
                               double* out_norm) {
  return guarded([&] {
    require_ptr(space, "space");
    require_ptr(u, "u");
    require_ptr(p, "p");
    require_ptr(out_norm, "out_norm");
    const std::size_t n = space->space.size();
    const varsob::ExponentField pf("p", std::vector<double>(p, p + n));
    *out_norm = varsob::luxemburg(space->space, varsob::FunctionSample(u, u + n), pf, tol).value;
  });
}

varsob_status varsob_minimal_gradient(const varsob_space* space, const double* u, const double* s, const double* p,
                                      double* g_out, double* out_objective) {
  return guarded([&] {
    require_ptr(space, "space");
    require_ptr(u, "u");
    require_ptr(s, "s");
    require_ptr(p, "p");
    require_ptr(out_objective, "out_objective");
    const std::size_t n = space->space.size();
    const varsob::ExponentField sf("s", std::vector<double>(s, s + n));
    const varsob::ExponentField pf("p", std::vector<double>(p, p + n));
    const auto sol = varsob::minimal_scalar_gradient(space->space, varsob::FunctionSample(u, u + n), sf, pf);
    *out_objective = sol.objective.value;
    if (g_out) std::copy(sol.g.begin(), sol.g.end(), g_out);
  });
}

varsob_status varsob_run(const char* command, const char* scenario_json, const char* options_json, char** out_json,
                         int* all_pass) {
  return guarded([&] {
    require_ptr(command, "command");
    require_ptr(scenario_json, "scenario_json");
    require_ptr(out_json, "out_json");
    const auto opts = varsob::scenario::options_from_json(options_json ? varsob::io::parse(options_json)
                                                                       : varsob::io::Json());
    const auto result = varsob::scenario::run(command, varsob::io::parse(scenario_json), opts);
    *out_json = copy_string(varsob::io::dump(result.output));
    if (all_pass) *all_pass = result.all_pass ? 1 : 0;
  });
}

varsob_status varsob_reports_to_csv(const char* reports_json, char** out_csv) {
  return guarded([&] {
    require_ptr(reports_json, "reports_json");
    require_ptr(out_csv, "out_csv");
    *out_csv = copy_string(varsob::io::reports_to_csv(varsob::io::parse(reports_json)));
  });
}

}  // extern "C"
