#ifndef MLS_S4_HPP
#define MLS_S4_HPP

// Formal classes and generic functions.
//
// Class definitions carry declared slots and an ordered `contains` list.
// The linearization lists a class and every superclass in depth-first
// declaration order (first occurrence wins); each entry records its
// shortest inheritance distance. Method selection picks the admissible
// method with the smallest total distance over the dispatch arguments,
// breaking ties by comparing per-argument distances left to right.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mls/interpreter.hpp"
#include "mls/value.hpp"

namespace mls::s4 {

inline constexpr std::string_view kAny = "ANY";
inline constexpr std::string_view kMissing = "missing";

struct Ancestor {
  std::string name;
  std::size_t distance = 0;

  friend bool operator==(const Ancestor&, const Ancestor&) = default;
};
using Lineage = std::vector<Ancestor>;

using SlotList = std::vector<std::pair<std::string, std::string>>;

struct ClassDefinition {
  std::string name;
  SlotList own_slots;
  std::vector<std::string> contains;
  bool is_virtual = false;
  bool is_basic = false;  // built-in base kinds such as "numeric"
  bool is_ref = false;    // registered on behalf of a reference class

  // Derived from the registry on every definition change.
  SlotList slots;  // own slots first, then inherited in linearization order
  Lineage linearization;
};

class ClassRegistry {
 public:
  ClassRegistry();

  /// Defines or redefines a class. Throws Error on an unknown superclass,
  /// an inheritance cycle or a slot name clashing with an inherited slot.
  const ClassDefinition& set_class(const std::string& name, SlotList slots,
                                   std::vector<std::string> contains, bool is_virtual = false,
                                   bool is_ref = false);

  const ClassDefinition* find(std::string_view name) const;
  bool defined(std::string_view name) const { return find(name) != nullptr; }

  /// Distance from `from` up to `to`: 0 for itself, the shortest
  /// containment path for a superclass, the linearization length for ANY,
  /// nullopt when unrelated.
  std::optional<std::size_t> superclass_distance(const std::string& from, const std::string& to) const;

  /// The linearization of a registered class; {cls:0} for unknown names.
  Lineage lineage_of(const std::string& cls) const;

  std::vector<std::string> names() const;

 private:
  void rebuild();
  Lineage linearize(const std::string& name) const;

  std::map<std::string, ClassDefinition, std::less<>> classes_;
};

struct MethodDefinition {
  std::vector<std::string> signature;
  Value implementation;
};

struct GenericFunction {
  std::string name;
  std::vector<Formal> formals;
  std::vector<std::string> signature;  // formals used for dispatch, in order
  std::map<std::vector<std::string>, MethodDefinition> methods;

  /// Adds or replaces the method keyed by its exact signature. Short
  /// signatures are padded with ANY.
  const MethodDefinition& set_method(std::vector<std::string> signature, Value implementation);
};

class GenericTable {
 public:
  GenericFunction* find(std::string_view name);
  const GenericFunction* find(std::string_view name) const;
  GenericFunction& define(GenericFunction g);
  std::vector<std::string> names() const;

 private:
  std::map<std::string, GenericFunction, std::less<>> generics_;
};

/// Distance from an actual argument's lineage to a declared class.
std::optional<std::size_t> lineage_distance(const Lineage& actual, std::string_view declared);

struct Selection {
  const MethodDefinition* method = nullptr;
  std::vector<std::size_t> distances;
};

/// Best method for per-argument lineages. Throws DispatchError when no
/// method is admissible or when two methods tie exactly.
Selection select_method(const GenericFunction& g, std::span<const Lineage> actual);
Selection select_method(const GenericFunction& g, const std::vector<std::string>& actual_classes,
                        const ClassRegistry& registry);

// -- runtime ---------------------------------------------------------------

/// Lineage used to dispatch on a value. Registered classes use their
/// linearization; an unregistered S3 class vector is read as its own
/// lineage (position = distance).
Lineage lineage_of_value(const ClassRegistry& registry, const Value& v);

/// Empty vector of the declared base kind; nullopt for classes that need
/// explicit initialization.
std::optional<Value> zero_value(const ClassRegistry& registry, const std::string& cls);

/// Reflective view of a class definition: an instance of
/// "classRepresentation" with slots className, slots, contains, virtual.
Value class_representation(const ClassDefinition& def);

Value new_instance(Interpreter& interp, const std::string& class_name, const std::vector<NamedValue>& inits);
Value slot_get(const Value& obj, const std::string& name);
/// Returns a modified copy; the slot value is type-checked.
Value slot_set(Interpreter& interp, const Value& obj, const std::string& name, const Value& v);

/// Registers a generic. When def is null the existing function named
/// `name` supplies the formals and becomes the default (ANY) method.
Value set_generic(Interpreter& interp, const std::string& name, const Value& def,
                  std::vector<std::string> signature, const EnvPtr& env);
Value set_method(Interpreter& interp, const std::string& name, const std::vector<NamedValue>& signature,
                 const Value& def, const EnvPtr& env);
Value method_value(const std::string& generic, const MethodDefinition& m);

/// Dispatch from inside a generic's body; env is the generic call frame.
Value standard_generic(Interpreter& interp, const std::string& name, const EnvPtr& env);

/// S4 dispatch for an operator on already evaluated operands, when a
/// generic for the operator exists and a method is admissible.
std::optional<Value> dispatch_operator(Interpreter& interp, const std::string& op,
                                       const std::vector<Value>& operands, const EnvPtr& env);

}  // namespace mls::s4

#endif  // MLS_S4_HPP
