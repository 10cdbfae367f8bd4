#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>

namespace spmd {

/// A deferred value, computed at most once on first `get()`. Copies share
/// the same underlying cell.
template <typename T>
class Lazy {
public:
    explicit Lazy(std::function<T()> thunk) : cell_(std::make_shared<Cell>(std::move(thunk))) {}

    static Lazy ready(T value)
    {
        Lazy out([] () -> T { throw std::logic_error("ready Lazy has no thunk"); });
        out.cell_->value.emplace(std::move(value));
        return out;
    }

    const T& get() const
    {
        if (!cell_->value) {
            cell_->value.emplace(cell_->thunk());
            cell_->thunk = nullptr;
        }
        return *cell_->value;
    }

    bool evaluated() const noexcept { return cell_->value.has_value(); }

private:
    struct Cell {
        explicit Cell(std::function<T()> t) : thunk(std::move(t)) {}
        std::function<T()> thunk;
        std::optional<T> value;
    };

    std::shared_ptr<Cell> cell_;
};

}  // namespace spmd
