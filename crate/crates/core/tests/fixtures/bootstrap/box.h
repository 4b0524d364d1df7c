#ifndef BOOTSTRAP_BOX_H
#define BOOTSTRAP_BOX_H

template<class T>
class Box
{
  public:
    Box();
    T get() const;
    void set(const T& value);
};

class Factory
{
  public:
    Factory();
    Box< int > make() const;
};

#endif
