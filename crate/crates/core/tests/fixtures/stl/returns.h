#ifndef STL_RETURNS_H
#define STL_RETURNS_H

#include <vector>

class Factory
{
  public:
    Factory();
    std::vector< int > make() const;
};

#endif
