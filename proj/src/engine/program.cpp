#include "ccx/engine/program.hpp"

#include <algorithm>

namespace ccx::engine {

Term Clause::to_term() const {
  if (is_fact()) return head;
  return Term::compound(":-", {head, body});
}

void Program::add_clause(ClausePtr clause) {
  const auto pi = indicator_of(clause->head);
  ensure_predicate(pi);
  auto& pred = predicates_[index_.at(pi)];
  auto next = std::make_shared<ClauseList>(*pred.clauses);
  next->push_back(clause);
  pred.clauses = std::move(next);
  load_order_.push_back(std::move(clause));
}

void Program::declare_dynamic(const PredicateIndicator& pi) {
  if (!is_dynamic(pi)) dynamic_.push_back(pi);
}

void Program::add_directive(Query directive) {
  directives_.push_back(std::move(directive));
  directive_marks_.push_back(load_order_.size());
}

void Program::ensure_predicate(const PredicateIndicator& pi) {
  if (index_.contains(pi)) return;
  index_.emplace(pi, predicates_.size());
  predicates_.push_back({pi, std::make_shared<const ClauseList>()});
}

bool Program::remove_clause(const PredicateIndicator& pi, const Clause* clause) {
  const auto it = index_.find(pi);
  if (it == index_.end()) return false;
  auto& pred = predicates_[it->second];
  const auto& list = *pred.clauses;
  const auto pos = std::find_if(list.begin(), list.end(), [&](const ClausePtr& c) { return c.get() == clause; });
  if (pos == list.end()) return false;
  auto next = std::make_shared<ClauseList>();
  next->reserve(list.size() - 1);
  for (auto i = list.begin(); i != list.end(); ++i) {
    if (i != pos) next->push_back(*i);
  }
  pred.clauses = std::move(next);
  return true;
}

void Program::append(const Program& other) {
  for (const auto& pi : other.dynamic_) declare_dynamic(pi);
  for (const auto& pred : other.predicates_) {
    ensure_predicate(pred.indicator);
    auto& mine = predicates_[index_.at(pred.indicator)];
    if (pred.clauses->empty()) continue;
    auto next = std::make_shared<ClauseList>(*mine.clauses);
    next->insert(next->end(), pred.clauses->begin(), pred.clauses->end());
    mine.clauses = std::move(next);
  }
  const std::size_t offset = load_order_.size();
  load_order_.insert(load_order_.end(), other.load_order_.begin(), other.load_order_.end());
  for (std::size_t i = 0; i < other.directives_.size(); ++i) {
    directives_.push_back(other.directives_[i]);
    directive_marks_.push_back(offset + other.directive_marks_[i]);
  }
}

const Program::Predicate* Program::find(const PredicateIndicator& pi) const {
  const auto it = index_.find(pi);
  return it == index_.end() ? nullptr : &predicates_[it->second];
}

std::shared_ptr<const Program::ClauseList> Program::clauses(const PredicateIndicator& pi) const {
  const auto* pred = find(pi);
  return pred == nullptr ? nullptr : pred->clauses;
}

bool Program::is_dynamic(const PredicateIndicator& pi) const {
  return std::find(dynamic_.begin(), dynamic_.end(), pi) != dynamic_.end();
}

std::size_t Program::clause_count() const {
  std::size_t n = 0;
  for (const auto& p : predicates_) n += p.clauses->size();
  return n;
}

bool operator==(const Program& a, const Program& b) {
  if (a.dynamic_ != b.dynamic_) return false;
  if (a.predicates_.size() != b.predicates_.size()) return false;
  for (std::size_t i = 0; i < a.predicates_.size(); ++i) {
    const auto& pa = a.predicates_[i];
    const auto& pb = b.predicates_[i];
    if (pa.indicator != pb.indicator || pa.clauses->size() != pb.clauses->size()) return false;
    for (std::size_t j = 0; j < pa.clauses->size(); ++j) {
      if (!((*pa.clauses)[j]->to_term() == (*pb.clauses)[j]->to_term())) return false;
    }
  }
  if (a.directives_.size() != b.directives_.size()) return false;
  for (std::size_t i = 0; i < a.directives_.size(); ++i) {
    if (!(a.directives_[i].term == b.directives_[i].term)) return false;
  }
  return true;
}

}  // namespace ccx::engine
