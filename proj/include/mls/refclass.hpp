#ifndef MLS_REFCLASS_HPP
#define MLS_REFCLASS_HPP

// Reference classes: mutable objects backed by an environment.
//
// Each instance owns a backing environment holding one binding per field
// (typed, possibly read-only or active) plus its methods, re-enclosed so
// that method bodies see fields and sibling methods by plain name and
// update fields with `<<-`. `.self` is bound to the instance. Copying the
// Value copies the reference; copy_instance is the explicit escape.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mls/interpreter.hpp"

namespace mls::refclass {

struct FieldSpec {
  std::string name;
  std::string declared_class = "ANY";
  bool read_only = false;
  Value getter;  // Null unless the field is active
  Value setter;

  bool is_active() const { return !getter.is_null(); }
};

struct RefClassDefinition {
  std::string name;
  std::vector<FieldSpec> fields;                      // inherited first
  std::vector<std::pair<std::string, Value>> methods;  // merged; overrides replace
  std::optional<std::string> contains;
  std::vector<std::string> lineage;  // self first
  EnvPtr definition_env;             // parent of every backing environment
};

class Registry {
 public:
  const RefClassDefinition* find(const std::string& name) const;
  const RefClassDefinition& define(RefClassDefinition def);

 private:
  std::map<std::string, RefClassDefinition> classes_;
};

/// Validates and registers a class (also as a slotless S4 class so that
/// instances take part in S4 dispatch). Returns the generator.
Value set_ref_class(Interpreter& interp, const std::string& name, const std::vector<FieldSpec>& fields,
                    const std::vector<std::pair<std::string, Value>>& methods,
                    const std::optional<std::string>& contains, const EnvPtr& env);

Value generator_value(const RefClassDefinition& def);
bool is_generator(const Value& v);
/// Generator member access: `$new`, `$className`, `$fields()`, `$methods()`.
Value generator_member(Interpreter& interp, const Value& gen, const std::string& name);

Value generator_new(Interpreter& interp, const std::string& class_name, const std::vector<NamedValue>& args);

Value field_get(Interpreter& interp, const Value& obj, const std::string& name);
void field_set(Interpreter& interp, const Value& obj, const std::string& name, const Value& v);
Value invoke_method(Interpreter& interp, const Value& obj, const std::string& name,
                    std::vector<NamedValue> args);
Value copy_instance(Interpreter& interp, const Value& obj);

const RefClassDefinition& definition_of(Interpreter& interp, const Value& obj);

/// Console form: header line then each field's current value.
std::string format_instance(Interpreter& interp, const Value& obj);

}  // namespace mls::refclass

#endif  // MLS_REFCLASS_HPP
